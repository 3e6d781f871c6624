"""Coefficient sequences: exact integer tables, normalized tables, lifts.

The discriminant cusp form coefficients tau(n) are computed exactly:
the weight-12 eta power is expanded from the pentagonal-number sparse
series, then raised to the 24th power by repeated convolution squaring
(24 = 16 + 8).  Each convolution is one big-integer multiplication:
polynomials are packed into fixed-width little-endian limbs (Kronecker
substitution, signed values split into a positive and a negative
carrier) and multiplied through gmpy2, which keeps the whole table
exact at any size we care about.

Normalized tables are float64 and immutable; index 0 is a zero
sentinel so values[n] is the coefficient at n for 1 <= n <= n_max.
"""

import math
import os
import re
from dataclasses import dataclass

import gmpy2
import numpy as np

from . import kernels
from .errors import (
    CoefficientParseError,
    DomainError,
    InsufficientInputError,
    NonContiguousIndexError,
    RangeError,
    ResourceLimitError,
    UnsupportedWeightError,
)

CACHE_VERSION = 1
DEFAULT_N_LIMIT = 1 << 24

KIND_GL2 = "gl2_lambda"
KIND_GL3 = "gl3_sym2"
KIND_USER = "user"
_KNOWN_KINDS = (KIND_GL2, KIND_GL3, KIND_USER)


@dataclass(frozen=True)
class ExactTauTable:
    """Exact integer coefficients tau(1..n_max); tau[0] is a 0 sentinel."""

    n_max: int
    tau: tuple


@dataclass(frozen=True)
class CoefficientTable:
    kind: str
    n_max: int
    values: np.ndarray
    weight: int | None = None
    label: str = ""

    def __post_init__(self):
        v = self.values
        if v.dtype != np.float64 or v.shape != (self.n_max + 1,):
            raise DomainError("coefficient array must be float64 of length n_max+1")
        if v[0] != 0.0:
            raise DomainError("values[0] must be the zero sentinel")
        if not np.isfinite(v).all():
            raise DomainError("coefficient values must all be finite")
        v.setflags(write=False)


@dataclass(frozen=True)
class FClassStats:
    """Window-variance and mean-square statistics of a table at scale X."""

    X: int
    A: float
    variance_integral: float
    second_moment: float


@dataclass(frozen=True)
class HeckeReport:
    passed: bool
    mode: str
    pairs_checked: int
    prime_powers_checked: int
    first_failure: tuple | None


@dataclass(frozen=True)
class DeligneReport:
    passed: bool
    n_checked: int
    exact_evaluations: int
    max_ratio: float
    first_violation: int | None


# ----------------------------------------------------------------------
# exact tau engine
# ----------------------------------------------------------------------

def _euler_coefficients(deg):
    """Coefficients of prod_{m>=1} (1 - q^m) through degree deg."""
    c = [0] * (deg + 1)
    c[0] = 1
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 > deg and g2 > deg:
            break
        s = -1 if k % 2 else 1
        if g1 <= deg:
            c[g1] = s
        if g2 <= deg:
            c[g2] = s
        k += 1
    return c


def _limb_bytes(n_max):
    # |tau(n)| <= d(n) n^{11/2}; d(n) < 2^12 for every n below 2^26,
    # so ceil(5.5 log2 n) + 13 bits (sign included) always fits.
    bits = math.ceil(5.5 * math.log2(max(n_max, 2))) + 13
    return max(16, (bits + 7) // 8)


def _pack(coeffs, b):
    pos = bytearray(len(coeffs) * b)
    neg = bytearray(len(coeffs) * b)
    for i, c in enumerate(coeffs):
        if c > 0:
            pos[i * b:i * b + b] = c.to_bytes(b, "little")
        elif c < 0:
            neg[i * b:i * b + b] = (-c).to_bytes(b, "little")
    return gmpy2.mpz(int.from_bytes(pos, "little")) - gmpy2.mpz(
        int.from_bytes(neg, "little"))


def _unpack(value, count, b):
    negate = value < 0
    if negate:
        value = -value
    nbytes = max(count * b, (int(value).bit_length() + 7) // 8)
    raw = int(value).to_bytes(nbytes + b, "little")
    half = 1 << (8 * b - 1)
    full = half << 1
    out = [0] * count
    carry = 0
    for i in range(count):
        u = int.from_bytes(raw[i * b:(i + 1) * b], "little") + carry
        if u >= half:
            u -= full
            carry = 1
        else:
            carry = 0
        out[i] = -u if negate else u
    return out


def _conv_square(coeffs, deg, b):
    p = _pack(coeffs, b)
    return _unpack(p * p, deg + 1, b)


def _conv_mul(a, c, deg, b):
    return _unpack(_pack(a, b) * _pack(c, b), deg + 1, b)


def _compute_tau_exact(n_max):
    deg = n_max - 1
    b = _limb_bytes(n_max)
    e = _euler_coefficients(deg)
    e = _conv_square(e, deg, b)      # E^2
    e = _conv_square(e, deg, b)      # E^4
    e4 = e
    e = _conv_square(e, deg, b)      # E^8
    e8 = e
    e = _conv_square(e, deg, b)      # E^16
    e24 = _conv_mul(e, e8, deg, b)   # E^24
    del e, e4, e8
    tau = [0] * (n_max + 1)
    tau[1:] = e24
    if tau[1] != 1:
        raise AssertionError("tau engine self-check failed: tau(1) != 1")
    return tau


def _cache_name(n_max):
    return f"tau_v{CACHE_VERSION}_n{n_max}.tsv"


def find_tau_cache(cache_dir, n_max):
    """Path of the smallest usable cached tau table, or None."""
    try:
        names = os.listdir(cache_dir)
    except FileNotFoundError:
        return None
    best = None
    pat = re.compile(rf"^tau_v{CACHE_VERSION}_n(\d+)\.tsv$")
    for name in names:
        m = pat.match(name)
        if m:
            n = int(m.group(1))
            if n >= n_max and (best is None or n < best[0]):
                best = (n, name)
    return os.path.join(cache_dir, best[1]) if best else None


def save_tau_cache(table, path):
    lines = [f"# kind=tau n_max={table.n_max} label=delta12-exact"]
    lines.extend(f"{n}\t{table.tau[n]}" for n in range(1, table.n_max + 1))
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")
    os.replace(tmp, path)


def load_tau_cache(path, n_max=None):
    with open(path) as fh:
        header = fh.readline()
        fields = _parse_header(header, path)
        if fields.get("kind") != "tau":
            raise CoefficientParseError(f"{path}: not an exact tau cache")
        file_n = int(fields["n_max"])
        if n_max is None:
            n_max = file_n
        if file_n < n_max:
            raise InsufficientInputError(
                f"{path}: cache holds n_max={file_n} < requested {n_max}")
        tau = [0] * (n_max + 1)
        for expect in range(1, n_max + 1):
            line = fh.readline()
            idx, _, val = line.partition("\t")
            if int(idx) != expect:
                raise NonContiguousIndexError(
                    f"{path}: expected index {expect}, found {idx.strip()}")
            tau[expect] = int(val)
    return ExactTauTable(n_max=n_max, tau=tuple(tau))


def compute_tau(n_max, cache_dir=None, n_limit=DEFAULT_N_LIMIT):
    """Exact tau(1..n_max), loading/writing a decimal cache when given a dir."""
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    if n_max > n_limit:
        raise ResourceLimitError(
            f"n_max={n_max} exceeds the configured limit {n_limit}")
    if cache_dir is not None:
        hit = find_tau_cache(cache_dir, n_max)
        if hit is not None:
            return load_tau_cache(hit, n_max)
    table = ExactTauTable(n_max=n_max, tau=tuple(_compute_tau_exact(n_max)))
    if cache_dir is not None:
        os.makedirs(cache_dir, exist_ok=True)
        save_tau_cache(table, os.path.join(cache_dir, _cache_name(n_max)))
    return table


# ----------------------------------------------------------------------
# normalized tables
# ----------------------------------------------------------------------

def normalize_gl2(table, weight=12):
    """Deligne-normalize an exact table: lambda(n) = tau(n) * n^(-11/2)."""
    if weight != 12:
        raise UnsupportedWeightError(f"weight {weight} not supported (only 12)")
    n = table.n_max
    vals = np.zeros(n + 1, dtype=np.float64)
    vals[1:] = np.fromiter((float(t) for t in table.tau[1:]), np.float64, count=n)
    scale = np.exp(-5.5 * np.log(np.arange(1, n + 1, dtype=np.float64)))
    vals[1:] *= scale
    return CoefficientTable(kind=KIND_GL2, n_max=n, values=vals, weight=12,
                            label="delta12-normalized")


def _sym2_accumulate(lam_sq, n_max, label):
    """Sum lambda(m^2) over factorizations n = d^2 m, vectorized over d."""
    vals = np.zeros(n_max + 1, dtype=np.float64)
    for d in range(1, math.isqrt(n_max) + 1):
        dd = d * d
        cnt = n_max // dd
        vals[dd::dd] += lam_sq[1:cnt + 1]
    return CoefficientTable(kind=KIND_GL3, n_max=n_max, values=vals,
                            weight=None, label=label)


def sym2_lift(lam, n_max):
    """Symmetric-square coefficients from a normalized GL(2) table.

    The source table must extend to n_max**2 because the lift reads
    lambda at squares up to (n_max)^2.
    """
    if lam.kind != KIND_GL2:
        raise DomainError("sym2_lift needs a gl2_lambda table")
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    if lam.n_max < n_max * n_max:
        raise InsufficientInputError(
            f"source table reaches {lam.n_max}, need {n_max * n_max}")
    m = np.arange(n_max + 1, dtype=np.int64)
    lam_sq = lam.values[m * m]          # lambda(m^2)
    return _sym2_accumulate(lam_sq, n_max,
                            label=f"sym2({lam.label or 'gl2'})")


def _spf_sieve(n):
    """Smallest prime factor of every integer up to n."""
    spf = np.zeros(n + 1, dtype=np.int64)
    spf[1] = 1
    for p in range(2, n + 1):
        if spf[p] == 0:
            spf[p::p][spf[p::p] == 0] = p
    return spf


def sym2_from_tau(table, n_max):
    """Symmetric-square table straight from exact integer coefficients.

    Produces the same values as sym2_lift(normalize_gl2(table), n_max)
    but only needs tau up to n_max: tau at higher prime powers (up to
    n_max^2) is reconstructed exactly with the recursion
    tau(p^(j+1)) = tau(p) tau(p^j) - p^11 tau(p^(j-1)), so the lift
    scales past the point where a dense lambda table would be absurd.
    """
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    if table.n_max < n_max:
        raise InsufficientInputError(
            f"source table reaches {table.n_max}, need {n_max}")
    t = table.tau
    spf = _spf_sieve(n_max)
    pp = {}                              # (p, j) -> tau(p^j), exact

    def tau_power(p, j):
        got = pp.get((p, j))
        if got is not None:
            return got
        if j == 0:
            val = 1
        elif j == 1:
            val = t[p]
        else:
            val = t[p] * tau_power(p, j - 1) - p ** 11 * tau_power(p, j - 2)
        pp[(p, j)] = val
        return val

    tau_sq = [0] * (n_max + 1)
    tau_sq[1] = 1
    for m in range(2, n_max + 1):
        rem = m
        val = 1
        while rem > 1:
            p = int(spf[rem])
            e = 0
            while rem % p == 0:
                rem //= p
                e += 1
            val *= tau_power(p, 2 * e)
        tau_sq[m] = val
    lam_sq = np.zeros(n_max + 1, dtype=np.float64)
    lam_sq[1:] = np.fromiter((float(v) for v in tau_sq[1:]), np.float64,
                             count=n_max)
    msq = np.arange(n_max + 1, dtype=np.float64) ** 2
    lam_sq[1:] *= np.exp(-5.5 * np.log(msq[1:]))
    return _sym2_accumulate(lam_sq, n_max, label="sym2(delta12-recursion)")


# ----------------------------------------------------------------------
# verification
# ----------------------------------------------------------------------

def _primes_up_to(n):
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.nonzero(sieve)[0].tolist()


def verify_hecke(table, trials=0, seed=0, pair_budget=2_000_000):
    """Check multiplicativity and the prime-power recursion on exact tau.

    Exhaustive over all coprime pairs m < n with mn <= n_max when that
    costs at most pair_budget pairs, otherwise a seeded random sample
    (of `trials` pairs, default 10000).  The prime-power recursion
    tau(p^{r+1}) = tau(p) tau(p^r) - p^11 tau(p^{r-1}) is always
    checked exhaustively; it is cheap.
    """
    t = table.tau
    N = table.n_max
    first_failure = None
    pairs = 0

    est = 0.3 * N * math.log(max(N, 2))
    exhaustive = est <= pair_budget and trials == 0
    if exhaustive:
        mode = "exhaustive"
        for m in range(2, math.isqrt(N) + 1):
            for n in range(m + 1, N // m + 1):
                if math.gcd(m, n) != 1:
                    continue
                pairs += 1
                if t[m] * t[n] != t[m * n]:
                    first_failure = ("multiplicativity", m, n)
                    break
            if first_failure:
                break
    else:
        mode = "sampled"
        want = trials if trials > 0 else 10_000
        rng = np.random.default_rng(seed + N)
        attempts = 0
        while pairs < want and attempts < 50 * want:
            attempts += 1
            m = int(rng.integers(2, math.isqrt(N) + 1))
            hi = N // m
            if hi <= m:
                continue
            n = int(rng.integers(m + 1, hi + 1))
            if math.gcd(m, n) != 1:
                continue
            pairs += 1
            if t[m] * t[n] != t[m * n]:
                first_failure = ("multiplicativity", m, n)
                break

    powers = 0
    if first_failure is None and N >= 4:
        p11cache = {}
        for p in _primes_up_to(math.isqrt(N)):
            p11 = p11cache.setdefault(p, p ** 11)
            q = p * p          # p^{r+1} with r = 1
            r = 1
            while q <= N:
                lhs = t[q]
                rhs = t[p] * t[q // p] - p11 * t[q // (p * p)]
                powers += 1
                if lhs != rhs:
                    first_failure = ("prime-power", p, r + 1)
                    break
                q *= p
                r += 1
            if first_failure:
                break

    return HeckeReport(passed=first_failure is None, mode=mode,
                       pairs_checked=pairs, prime_powers_checked=powers,
                       first_failure=first_failure)


def deligne_check(table, lam=None):
    """Verify |lambda(n)| <= d(n) for all n, exactly on borderline cases.

    The float comparison |lambda| / d < 1 - 1e-9 clears almost every n;
    anything closer to the boundary is settled in exact integers via
    tau(n)^2 <= d(n)^2 n^11.
    """
    N = table.n_max
    if lam is None:
        lam = normalize_gl2(table)
    if lam.n_max < N:
        raise InsufficientInputError("normalized table shorter than tau table")
    dint = kernels.divisor_sieve(N)
    d = dint.astype(np.float64)
    d[0] = 1.0
    ratio = np.abs(lam.values[:N + 1]) / d
    ratio[0] = 0.0
    max_ratio = float(ratio.max())
    suspect = np.nonzero(ratio > 1.0 - 1e-9)[0]
    exact = 0
    first_violation = None
    for n in suspect:
        n = int(n)
        exact += 1
        dn = int(dint[n])
        if table.tau[n] ** 2 > dn * dn * n ** 11:
            first_violation = n
            break
    return DeligneReport(passed=first_violation is None, n_checked=N,
                         exact_evaluations=exact, max_ratio=max_ratio,
                         first_violation=first_violation)


# ----------------------------------------------------------------------
# coefficient files
# ----------------------------------------------------------------------

def _parse_header(line, path):
    if not line.startswith("#"):
        raise CoefficientParseError(f"{path}: missing header line")
    fields = {}
    for tok in line[1:].split():
        key, eq, val = tok.partition("=")
        if eq:
            fields[key] = val
    return fields


def save_coefficients(table, path):
    """Write a table in the plain text exchange format (n TAB value)."""
    head = (f"# kind={table.kind} n_max={table.n_max} "
            f"label={table.label or 'unlabeled'}")
    vals = table.values
    lines = [head]
    lines.extend(f"{n}\t{float(vals[n])!r}" for n in range(1, table.n_max + 1))
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")
    os.replace(tmp, path)


def read_coefficient_file(path):
    """Parse a coefficient file; returns (header fields, float64 array)."""
    with open(path) as fh:
        raw = fh.read()
    lines = raw.splitlines()
    fields = {}
    start = 0
    if lines and lines[0].lstrip().startswith("#"):
        fields = _parse_header(lines[0].lstrip(), path)
        start = 1
    rows = []
    for i in range(start, len(lines)):
        line = lines[i].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise CoefficientParseError(f"{path}:{i + 1}: expected 'n<TAB>value'")
        try:
            idx = int(parts[0])
            val = float(parts[1])
        except ValueError:
            raise CoefficientParseError(f"{path}:{i + 1}: bad number") from None
        if not math.isfinite(val):
            raise CoefficientParseError(f"{path}:{i + 1}: non-finite value")
        rows.append((idx, val))
    if not rows:
        raise CoefficientParseError(f"{path}: empty coefficient file")
    for pos, (idx, _) in enumerate(rows, start=1):
        if idx != pos:
            raise NonContiguousIndexError(
                f"{path}: indices must run 1..N; found {idx} at row {pos}")
    vals = np.zeros(len(rows) + 1, dtype=np.float64)
    vals[1:] = [v for _, v in rows]
    return fields, vals


def load_user_coefficients(path):
    """Load an externally supplied table; the kind is always 'user'."""
    fields, vals = read_coefficient_file(path)
    return CoefficientTable(kind=KIND_USER, n_max=vals.shape[0] - 1,
                            values=vals, weight=None,
                            label=fields.get("label", os.path.basename(path)))


def load_coefficients(path):
    """Load a table written by save_coefficients, trusting its header kind."""
    fields, vals = read_coefficient_file(path)
    kind = fields.get("kind", KIND_USER)
    if kind not in _KNOWN_KINDS:
        kind = KIND_USER
    weight = 12 if kind == KIND_GL2 else None
    return CoefficientTable(kind=kind, n_max=vals.shape[0] - 1, values=vals,
                            weight=weight, label=fields.get("label", ""))
