"""Independent reference for the counter-based RNG and the fishing draw.

draw(seed, k) = mix(seed + (k + 1) * GOLDEN) with the splitmix64 finaliser;
a draw is a fish when draw / 2**64 < num / den.
"""
import sys

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix(z):
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK
    return z ^ (z >> 31)


def draw(seed, k):
    return mix((seed + (k + 1) * GOLDEN) & MASK)


def fish(d, num, den):
    return d * den < num * (1 << 64)


if __name__ == "__main__":
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 42
    first = [draw(seed, k) for k in range(5)]
    print("first draws:", [hex(d) for d in first])
    print("fish?      :", [fish(d, 1, 2) for d in first])
    print("fish in 10000:", sum(fish(draw(seed, k), 1, 2) for k in range(10000)))
