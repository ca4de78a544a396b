"""Small shared helpers."""

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 step; a stable 64-bit mix (Python's hash() is not portable)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, key: int) -> int:
    """Per-task RNG seed: base seed XOR a mixed key, so tasks are independent."""
    return (int(seed) ^ splitmix64(int(key))) & _MASK64
