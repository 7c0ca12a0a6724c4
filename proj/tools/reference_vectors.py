#!/usr/bin/env python3
"""Independent reference implementation used to freeze the known-answer
vectors in tests/test_rng.cpp and tests/test_model.cpp.

Everything here is plain-integer Python, written from the published
splitmix64/xoshiro256** definitions and from the documented draw-order
contracts (not from the C++ sources). Re-run it whenever a frozen constant
needs to be audited:

    python3 tools/reference_vectors.py
"""

M64 = (1 << 64) - 1


def splitmix64(state):
    state = (state + 0x9E3779B97F4A7C15) & M64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return state, z ^ (z >> 31)


def mix64(z):
    z &= M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return z ^ (z >> 31)


def rotl(x, k):
    return ((x << k) | (x >> (64 - k))) & M64


class Xoshiro256StarStar:
    def __init__(self, seed=None, state=None):
        if state is not None:
            self.s = list(state)
        else:
            self.s = []
            sm = seed
            for _ in range(4):
                sm, out = splitmix64(sm)
                self.s.append(out)
        self.draws = 0

    def next_u64(self):
        s = self.s
        result = (rotl((s[1] * 5) & M64, 7) * 9) & M64
        t = (s[1] << 17) & M64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
        self.draws += 1
        return result

    def next_u01(self):
        return (self.next_u64() >> 11) * 2.0 ** -53

    def next_below(self, bound):
        if bound == 1:
            return 0
        mask = M64 >> max(0, 64 - (bound - 1).bit_length())
        while True:
            v = self.next_u64() & mask
            if v < bound:
                return v


def derive_seed(master, t, l, rep):
    h = master
    h = mix64((h + 0x9E3779B97F4A7C15 + t) & M64)
    h = mix64((h + 0xC2B2AE3D27D4EB4F + l) & M64)
    h = mix64((h + 0x165667B19E3779F9 + rep) & M64)
    return h


def hex64(v):
    return f"0x{v:016X}ull"


def main():
    print("== splitmix64 from state 0 ==")
    st = 0
    outs = []
    for _ in range(3):
        st, z = splitmix64(st)
        outs.append(z)
    print(", ".join(hex64(v) for v in outs))

    print("\n== xoshiro256** from raw state {1,2,3,4} ==")
    g = Xoshiro256StarStar(state=[1, 2, 3, 4])
    print(", ".join(hex64(g.next_u64()) for _ in range(5)))

    print("\n== RngStream(42): first 8 raw outputs ==")
    g = Xoshiro256StarStar(seed=42)
    print(", ".join(hex64(g.next_u64()) for _ in range(8)))

    print("\n== RngStream(42): first 4 u01 ==")
    g = Xoshiro256StarStar(seed=42)
    print(", ".join(f"{g.next_u01():.17g}" for _ in range(4)))

    print("\n== RngStream(42): 12 x next_below(9), then raw draw count ==")
    g = Xoshiro256StarStar(seed=42)
    vals = [g.next_below(9) for _ in range(12)]
    print(", ".join(str(v) for v in vals), "| draws =", g.draws)

    print("\n== derive_seed ==")
    for args in [(1, 0, 0, 0), (1, 0, 0, 1), (1, 0, 1, 0), (1, 1, 0, 0), (0xDEADBEEF, 3, 5, 7)]:
        print(f"derive_seed{args} = {hex64(derive_seed(*args))}")

    print("\n== 3x3 PDPA init, seed 42 (row-major: strategy draw, then level draw) ==")
    g = Xoshiro256StarStar(seed=42)
    cells = []
    for _ in range(9):
        s = g.next_below(2)
        lvl = g.next_below(9)
        cells.append((s, lvl))
    print(" ".join(f"{'D' if s else 'C'}{lvl}" for s, lvl in cells), "| draws =", g.draws)

    print("\n== 3x3 OPD init, seed 7 (strategy draw, then 50/50 level 0 or 8) ==")
    g = Xoshiro256StarStar(seed=7)
    cells = []
    for _ in range(9):
        s = g.next_below(2)
        lvl = 0 if g.next_below(2) == 0 else 8
        cells.append((s, lvl))
    print(" ".join(f"{'D' if s else 'C'}{lvl}" for s, lvl in cells), "| draws =", g.draws)

    print("\n== 3x3 PD init, seed 5 (strategy draw only) ==")
    g = Xoshiro256StarStar(seed=5)
    cells = [g.next_below(2) for _ in range(9)]
    print(" ".join("D" if s else "C" for s in cells), "| draws =", g.draws)


if __name__ == "__main__":
    main()
