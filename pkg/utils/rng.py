import numpy as np

# SplitMix64 (Steele, Lea & Flood). Output i of a seed is mix(seed + (i+1)*gamma),
# so any output can be produced without generating the ones before it.
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_1 = 0xBF58476D1CE4E5B9
MIX_2 = 0x94D049BB133111EB
MASK_64 = (1 << 64) - 1

_GAMMA_U64 = np.uint64(GOLDEN_GAMMA)
_MIX_1_U64 = np.uint64(MIX_1)
_MIX_2_U64 = np.uint64(MIX_2)
_TWO_PI = 2.0 * np.pi

def mix64(z):
    z &= MASK_64
    z = ((z ^ (z >> 30)) * MIX_1) & MASK_64
    z = ((z ^ (z >> 27)) * MIX_2) & MASK_64
    return z ^ (z >> 31)

def splitmix64_output(seed, index):
    return mix64((int(seed) + (index + 1) * GOLDEN_GAMMA) & MASK_64)

def derive_seeds(seed, count):
    return [splitmix64_output(seed, i) for i in range(count)]

def splitmix64(seed, count, start=0):
    counters = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(int(seed) & MASK_64) + counters * _GAMMA_U64
    z = (z ^ (z >> np.uint64(30))) * _MIX_1_U64
    z = (z ^ (z >> np.uint64(27))) * _MIX_2_U64
    return z ^ (z >> np.uint64(31))

def splitmix64_top_bits(seed, count):
    return (splitmix64(seed, count) >> np.uint64(63)).astype(np.uint8)

def splitmix64_bits(seed, count, start=0):
    # all 64 bits of each output, most significant first
    if count == 0:
        return np.zeros(0, dtype=np.uint8)
    first_word = start // 64
    last_word = (start + count - 1) // 64
    words = splitmix64(seed, last_word - first_word + 1, start=first_word)
    bits = np.unpackbits(words.astype('>u8').view(np.uint8))
    offset = start - first_word * 64
    return bits[offset:offset + count]

def uniform_from_words(words):
    # (0, 1], never zero so log() is safe
    return ((words >> np.uint64(11)).astype(np.float64) + 1.0) * (1.0 / 9007199254740992.0)

def splitmix64_uniform(seed, count, start=0):
    return uniform_from_words(splitmix64(seed, count, start=start))

def box_muller(seed, count, start=0):
    words = splitmix64(seed, 2 * count, start=2 * start)
    u1 = uniform_from_words(words[0::2])
    u2 = uniform_from_words(words[1::2])
    radius = np.sqrt(-2.0 * np.log(u1))
    return radius * np.cos(_TWO_PI * u2), radius * np.sin(_TWO_PI * u2)
