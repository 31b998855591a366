"""Hot numeric kernels: truncated factorial products, unit power sums, and
brute-force point counts over small finite fields.

Everything here works on machine integers modulo ``mod`` with the guarantee
``mod <= 10**8`` (enforced by callers), so intermediate products fit in int64.
Two backends are provided:

* numba ``@njit`` kernels (default), and
* a pure-numpy path, selected with ``PADHG_KERNEL=numpy`` (also used
  automatically when numba is unavailable).

Both backends are bit-identical; ``benchmarks/bench_kernels.py`` compares
their throughput.
"""

import os

import numpy as np

_BACKEND = os.environ.get("PADHG_KERNEL", "numba").strip().lower()
if _BACKEND not in ("numba", "numpy"):
    _BACKEND = "numba"

if _BACKEND == "numba":
    try:
        from numba import njit
    except ImportError:            # pragma: no cover - degraded environment
        _BACKEND = "numpy"

USING_NUMBA = _BACKEND == "numba"

# Prefix tables (int64) are cached up to this many entries in total; beyond
# it the kernels stream per call.
TABLE_CAP = 60_000_000


def backend_name():
    return _BACKEND


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------

if USING_NUMBA:

    @njit(cache=True)
    def _modpow_nb(base, exp, mod):
        result = 1
        b = base % mod
        e = exp
        while e > 0:
            if e & 1:
                result = (result * b) % mod
            b = (b * b) % mod
            e >>= 1
        return result

    @njit(cache=True)
    def _gamma_product_nb(p, mod, n):
        # prod_{0<k<n, p∤k} k  (mod `mod`)
        res = 1
        for k in range(1, n):
            if k % p != 0:
                res = (res * k) % mod
        return res

    @njit(cache=True)
    def _gamma_table_nb(p, mod, length):
        # out[j] = prod_{0<k<=j, p∤k} k  (mod `mod`)
        out = np.empty(length, np.int64)
        run = 1
        out[0] = 1
        for j in range(1, length):
            if j % p != 0:
                run = (run * j) % mod
            out[j] = run
        return out

    @njit(cache=True)
    def _power_sum_pos_nb(p, mod, n, e):
        # sum_{0<k<n, p∤k} k^e  (mod `mod`), e >= 0
        total = 0
        for k in range(1, n):
            if k % p != 0:
                total = (total + _modpow_nb(k, e, mod)) % mod
        return total

    @njit(cache=True)
    def _power_sum_neg_nb(p, mod, n, a, phi):
        # sum_{0<k<n, p∤k} k^(-a)  (mod `mod`), a > 0, phi = euler_phi(mod);
        # blockwise batch inversion keeps this at O(1) modmuls per term
        B = 4096
        vals = np.empty(B, np.int64)
        pref = np.empty(B, np.int64)
        total = 0
        k = 1
        while k < n:
            cnt = 0
            while k < n and cnt < B:
                if k % p != 0:
                    vals[cnt] = k % mod
                    cnt += 1
                k += 1
            if cnt == 0:
                continue
            run = 1
            for i in range(cnt):
                run = (run * vals[i]) % mod
                pref[i] = run
            acc = _modpow_nb(run, phi - 1, mod)   # inverse of full block product
            for i in range(cnt - 1, -1, -1):
                if i > 0:
                    inv_i = (acc * pref[i - 1]) % mod
                else:
                    inv_i = acc
                acc = (acc * vals[i]) % mod       # now the inverse of pref[i-1]
                total = (total + _modpow_nb(inv_i, a, mod)) % mod
        return total

    @njit(cache=True)
    def _power_table_nb(p, mod, length, e_eff):
        # out[j] = sum_{0<k<=j, p∤k} k^e_eff (mod `mod`), e_eff >= 0
        out = np.empty(length, np.int64)
        run = 0
        out[0] = 0
        for j in range(1, length):
            if j % p != 0:
                run = (run + _modpow_nb(j, e_eff, mod)) % mod
            out[j] = run
        return out

    @njit(cache=True)
    def _legendre_sum_nb(p, lam):
        # sum_x chi2(x(x-1)(x-lam)) with chi2 the quadratic character of F_p
        half = (p - 1) // 2
        total = 0
        for x in range(p):
            t = (x * ((x - 1) % p)) % p * ((x - lam) % p) % p
            if t != 0:
                s = _modpow_nb(t, half, p)
                total += 1 if s == 1 else -1
        return total

    @njit(cache=True)
    def _cone_count_nb(add, mul, neg, powd, poww, wcodes, dlam, q, nvars):
        # zeros in F_q^nvars of sum_i w_i x_i^d - (d*lam) * prod_i x_i^{w_i};
        # field elements are coded 0..q-1, arithmetic via the passed tables
        idx = np.zeros(nvars, np.int64)
        npts = 1
        for _ in range(nvars):
            npts *= q
        count = 0
        for _ in range(npts):
            acc = 0
            prod = 1
            for i in range(nvars):
                x = idx[i]
                acc = add[acc, mul[wcodes[i], powd[x]]]
                prod = mul[prod, poww[i, x]]
            if add[acc, neg[mul[dlam, prod]]] == 0:
                count += 1
            j = 0
            while j < nvars:
                idx[j] += 1
                if idx[j] < q:
                    break
                idx[j] = 0
                j += 1
        return count

else:

    def _modpow_nb(base, exp, mod):   # pragma: no cover - numpy-only env
        return pow(int(base), int(exp), int(mod))


# ---------------------------------------------------------------------------
# numpy fallback implementations
# ---------------------------------------------------------------------------

_CHUNK = 1 << 18


def _np_units(p, lo, hi):
    k = np.arange(lo, hi, dtype=np.int64)
    return k[k % p != 0]


def _np_modpow_vec(base, exp, mod):
    # vectorized square-and-multiply; values < mod <= 1e8, products fit int64
    result = np.ones_like(base)
    b = base % mod
    e = int(exp)
    while e > 0:
        if e & 1:
            result = result * b % mod
        b = b * b % mod
        e >>= 1
    return result


def _np_modprod(arr, mod):
    # tree reduction with a mod at every level
    while arr.size > 1:
        if arr.size & 1:
            last = int(arr[-1])
            arr = arr[:-1]
        else:
            last = None
        arr = arr[0::2] * arr[1::2] % mod
        if last is not None:
            arr = np.concatenate([arr, np.array([last], dtype=np.int64)])
    return int(arr[0]) if arr.size else 1


def _gamma_product_np(p, mod, n):
    res = 1
    for lo in range(1, n, _CHUNK):
        ks = _np_units(p, lo, min(n, lo + _CHUNK))
        if ks.size:
            res = res * _np_modprod(ks % mod, mod) % mod
    return res


def _gamma_table_np(p, mod, length):
    k = np.arange(length, dtype=np.int64)
    fac = np.where(k % p != 0, k % mod, 1)
    fac[0] = 1
    out = np.empty(length, np.int64)
    run = 1
    for j in range(length):               # sequential mod-cumprod
        run = run * int(fac[j]) % mod
        out[j] = run
    out[0] = 1
    return out


def _power_sum_np(p, mod, n, e_eff):
    total = 0
    for lo in range(1, n, _CHUNK):
        ks = _np_units(p, lo, min(n, lo + _CHUNK))
        if ks.size:
            total = (total + int(_np_modpow_vec(ks % mod, e_eff, mod).sum() % mod)) % mod
    return total


def _power_table_np(p, mod, length, e_eff):
    k = np.arange(length, dtype=np.int64)
    term = np.where(k % p != 0, _np_modpow_vec(k % mod, e_eff, mod), 0)
    term[0] = 0
    return np.cumsum(term % mod) % mod


def _legendre_sum_np(p, lam):
    x = np.arange(p, dtype=np.int64)
    t = x * ((x - 1) % p) % p * ((x - lam) % p) % p
    s = _np_modpow_vec(t, (p - 1) // 2, p)
    return int(np.where(t == 0, 0, np.where(s == 1, 1, -1)).sum())


def _cone_count_np(add, mul, neg, powd, poww, wcodes, dlam, q, nvars):
    # vectorized odometer: array of all points, one axis at a time
    pts = np.zeros(1, dtype=np.int64)
    acc = np.zeros(1, dtype=np.int64)
    prod = np.ones(1, dtype=np.int64)
    for i in range(nvars):
        xs = np.arange(q, dtype=np.int64)
        acc = add[acc[:, None], mul[wcodes[i], powd[xs]][None, :]].ravel()
        prod = mul[prod[:, None], poww[i, xs][None, :]].ravel()
    lhs = add[acc, neg[mul[dlam, prod]]]
    return int((lhs == 0).sum())


# ---------------------------------------------------------------------------
# public dispatchers
# ---------------------------------------------------------------------------

def gamma_product(p, mod, n):
    """prod_{0<k<n, p∤k} k mod `mod`."""
    if n <= 1:
        return 1
    if USING_NUMBA:
        return int(_gamma_product_nb(p, mod, n))
    return _gamma_product_np(p, mod, n)


def gamma_table(p, mod, length):
    """Prefix products: out[j] = prod_{0<k<=j, p∤k} k mod `mod`."""
    if USING_NUMBA:
        return _gamma_table_nb(p, mod, length)
    return _gamma_table_np(p, mod, length)


def power_sum(p, mod, n, e, phi):
    """sum_{0<k<n, p∤k} k^e mod `mod` (e any integer; phi = euler_phi(mod))."""
    if n <= 1:
        return 0
    if USING_NUMBA:
        if e >= 0:
            return int(_power_sum_pos_nb(p, mod, n, e))
        return int(_power_sum_neg_nb(p, mod, n, -e, phi))
    return _power_sum_np(p, mod, n, e % phi)


def power_table(p, mod, length, e, phi):
    """Prefix power sums: out[j] = sum_{0<k<=j, p∤k} k^e mod `mod`."""
    e_eff = e % phi
    if USING_NUMBA:
        return _power_table_nb(p, mod, length, e_eff)
    return _power_table_np(p, mod, length, e_eff)


def legendre_sum(p, lam):
    """sum_x chi2(x(x-1)(x-lam)) over F_p; a_p of the Legendre curve is -this."""
    if USING_NUMBA:
        return int(_legendre_sum_nb(p, lam))
    return _legendre_sum_np(p, lam)


def cone_count(add, mul, neg, powd, poww, wcodes, dlam, q, nvars):
    """Affine zero count of a weighted-diagonal-minus-monomial form over F_q."""
    if USING_NUMBA:
        return int(_cone_count_nb(add, mul, neg, powd, poww,
                                  wcodes, dlam, q, nvars))
    return _cone_count_np(add, mul, neg, powd, poww, wcodes, dlam, q, nvars)
