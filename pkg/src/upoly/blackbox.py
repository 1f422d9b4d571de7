"""Black-box access to integer polynomials.

Two access models.  A modular black box (MBB) answers single queries
f(a) mod m.  A modular derivative black box (MDBB) answers batched
queries along geometric sequences: given (p, omega, m, k) it returns the
first k evaluations of both f and its shifted derivative x*f'(x) at the
powers of omega.  Every interpolation routine in this package consumes
MDBBs, and the cost instrumentation lives here: each box carries an
EvalStats recording how often and how hard it was queried.

An MBB can be promoted to an MDBB without knowing f, because

    f((1+m)*x) - f(x)  =  m * x * f'(x)   (mod m**2),

so two MBB queries at modulus m**2 recover one (value, derivative) pair
at modulus m.  A straight-line program is one genuine black-box source;
the slp v1 text format for it is parsed here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .modring import _dft, _geometric_eval, _idft
from .polycore import SparsePoly

# Cost model for explicit_mdbb's two evaluation paths: a length-p
# transform costs about FACTOR*p*log2(p) unit products through the packed
# convolution, sparse geometric evaluation of t terms costs t*k.
DENSE_EVAL_FACTOR = 3


class BlackBoxContractError(RuntimeError):
    """An oracle returned values inconsistent with being a polynomial."""


class SlpError(ValueError):
    """Malformed slp text; .line holds the offending 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__("line %d: %s" % (line, message))
        self.line = line


@dataclass
class EvalStats:
    """Monotone counters across the probes made to one black box."""

    calls: int = 0
    sum_k: int = 0
    max_p: int = 0
    max_logm: int = 0

    def record(self, p: int, k: int, m: int):
        self.calls += 1
        self.sum_k += k
        if p > self.max_p:
            self.max_p = p
        lb = m.bit_length()
        if lb > self.max_logm:
            self.max_logm = lb

    def reset(self):
        self.calls = self.sum_k = self.max_p = self.max_logm = 0

    def as_dict(self) -> dict:
        return {
            "calls": self.calls,
            "sum_k": self.sum_k,
            "max_p": self.max_p,
            "max_logm": self.max_logm,
        }


class MBB:
    """Single-point modular oracle: eval(a, m) = f(a) mod m."""

    def __init__(self, fn, stats: EvalStats = None):
        self.fn = fn
        self.stats = stats if stats is not None else EvalStats()

    def eval(self, a: int, m: int) -> int:
        if m < 2:
            raise ValueError("modulus must be at least 2")
        self.stats.record(0, 1, m)
        return self.fn(a, m) % m


class MDBB:
    """Geometric-sequence oracle for a polynomial and its shifted
    derivative.

    eval(p, omega, m, k) returns (alphas, gammas) with
    alphas[i] = f(omega**i) mod m and gammas[i] = (x*f')(omega**i) mod m
    for 0 <= i < k.  The caller must supply omega of order exactly p
    mod m; that contract is not re-checked per call.
    """

    def __init__(self, fn, stats: EvalStats = None):
        self.fn = fn
        self.stats = stats if stats is not None else EvalStats()

    def eval(self, p: int, omega: int, m: int, k: int):
        if not 1 <= k <= p:
            raise ValueError("need 1 <= k <= p")
        if m < 2:
            raise ValueError("modulus must be at least 2")
        self.stats.record(p, k, m)
        alphas, gammas = self.fn(p, omega, m, k)
        if len(alphas) != k or len(gammas) != k:
            raise BlackBoxContractError("oracle returned wrong batch size")
        return [a % m for a in alphas], [g % m for g in gammas]


def explicit_mbb(f: SparsePoly, stats: EvalStats = None) -> MBB:
    """MBB backed by a known sparse polynomial."""
    return MBB(lambda a, m: f.eval_mod(a, m), stats=stats)


def explicit_mdbb(f: SparsePoly, stats: EvalStats = None) -> MDBB:
    """MDBB backed by a known sparse polynomial.

    Each query folds f and x*f'(x) modulo (x**p - 1, m), the derivative
    coefficient taken as c*(e mod m) from the original exponent, and then
    evaluates each folded polynomial either termwise along the geometric
    sequence or, when the batch is long enough to amortize it, by a full
    length-p transform truncated to k.
    """
    terms = f.terms

    def fn(p, omega, m, k):
        tf: dict = {}
        tg: dict = {}
        for c, e in terms:
            r = e % p
            cm = c % m
            tf[r] = (tf.get(r, 0) + cm) % m
            tg[r] = (tg.get(r, 0) + cm * (e % m)) % m
        t = max(len(tf), 1)
        if DENSE_EVAL_FACTOR * p * (p.bit_length() + 1) <= t * k:
            dense_f = [0] * p
            dense_g = [0] * p
            for r, c in tf.items():
                dense_f[r] = c
            for r, c in tg.items():
                dense_g[r] = c
            return (
                _dft(dense_f, omega, m)[:k],
                _dft(dense_g, omega, m)[:k],
            )
        return (
            _geometric_eval([(c, e) for e, c in tf.items()], omega, m, k, p),
            _geometric_eval([(c, e) for e, c in tg.items()], omega, m, k, p),
        )

    return MDBB(fn, stats=stats)


def mbb_to_mdbb(mbb: MBB, stats: EvalStats = None) -> MDBB:
    """Promote a value-only oracle to a derivative oracle.

    Costs two MBB queries at modulus m**2 per requested point.  The
    points walk omega incrementally mod m and are lifted into the m**2
    queries.  Raises BlackBoxContractError if a finite difference is not
    divisible by m, which cannot happen for a genuine polynomial oracle.
    """

    def fn(p, omega, m, k):
        m2 = m * m
        shift = 1 + m
        omega = omega % m
        alphas = [0] * k
        gammas = [0] * k
        cur = 1
        for i in range(k):
            base = mbb.eval(cur, m2)
            moved = mbb.eval(shift * cur % m2, m2)
            diff = (moved - base) % m2
            if diff % m:
                raise BlackBoxContractError(
                    "finite difference not divisible by the modulus"
                )
            alphas[i] = base % m
            gammas[i] = diff // m
            cur = cur * omega % m
        return alphas, gammas

    return MDBB(fn, stats=stats)


def sum_mdbb(pi1: MDBB, pi2: MDBB, stats: EvalStats = None) -> MDBB:
    """MDBB for f + g given MDBBs for f and g; one inner query each."""

    def fn(p, omega, m, k):
        a1, g1 = pi1.eval(p, omega, m, k)
        a2, g2 = pi2.eval(p, omega, m, k)
        return (
            [(x + y) % m for x, y in zip(a1, a2)],
            [(x + y) % m for x, y in zip(g1, g2)],
        )

    return MDBB(fn, stats=stats)


def prod_mdbb(pi1: MDBB, pi2: MDBB, stats: EvalStats = None) -> MDBB:
    """MDBB for f * g; one inner query each, via the product rule
    x*(fg)' = (x*f')*g + (x*g')*f."""

    def fn(p, omega, m, k):
        a1, g1 = pi1.eval(p, omega, m, k)
        a2, g2 = pi2.eval(p, omega, m, k)
        alphas = [x * y % m for x, y in zip(a1, a2)]
        gammas = [
            (u * y + v * x) % m
            for x, u, y, v in zip(a1, g1, a2, g2)
        ]
        return alphas, gammas

    return MDBB(fn, stats=stats)


def _residue_poly(values) -> SparsePoly:
    f = SparsePoly()
    f.terms = tuple((v, e) for e, v in enumerate(values) if v)
    return f


def mdbb_image(pi: MDBB, ctx, want_h: bool = True):
    """Residues of f and x*f'(x) modulo (x**p - 1, m) as polynomials.

    One full-length query (k = p) followed by inverse transforms; the
    returned coefficients are residues in [0, m), so callers wanting
    signed values apply signed_lift themselves.  h is None when want_h is
    false, which saves its inverse transform in the paths that only read
    the function image.
    """
    alphas, gammas = pi.eval(ctx.p, ctx.omega, ctx.m, ctx.p)
    g = _residue_poly(_idft(alphas, ctx.omega, ctx.m))
    h = None
    if want_h:
        h = _residue_poly(_idft(gammas, ctx.omega, ctx.m))
    return g, h


# --- straight-line programs ------------------------------------------------

_SLP_ARITY = {"const": 1, "input": 0, "add": 2, "sub": 2, "mul": 2, "pow": 2}
_MAX_POW = 1 << 63


def _slp_int(token: str, line: int, allow_negative: bool) -> int:
    body = token[1:] if allow_negative and token.startswith("-") else token
    if not body.isdigit():
        raise SlpError(line, "not a decimal integer: %r" % token)
    if len(body) > 1 and body[0] == "0":
        raise SlpError(line, "leading zeros are not canonical: %r" % token)
    return int(token)


def parse_slp(text: str):
    """Parse slp v1 text into a validated instruction tuple.

    One instruction per line after the header; each line defines the next
    register, operands refer to earlier registers by index, and the last
    register is the program output.
    """
    lines = text.splitlines()
    if not lines or lines[0] != "slp 1":
        raise SlpError(1, "bad header: expected 'slp 1'")
    program = []
    for lineno, raw in enumerate(lines[1:], start=2):
        parts = raw.split(" ")
        if "" in parts:
            raise SlpError(lineno, "malformed instruction")
        op, args = parts[0], parts[1:]
        if op not in _SLP_ARITY:
            raise SlpError(lineno, "unknown instruction %r" % op)
        if len(args) != _SLP_ARITY[op]:
            raise SlpError(lineno, "%s takes %d operand(s)" % (op, _SLP_ARITY[op]))
        reg = len(program)
        if op == "const":
            program.append(("const", _slp_int(args[0], lineno, True)))
            continue
        if op == "input":
            program.append(("input",))
            continue
        i = _slp_int(args[0], lineno, False)
        if i >= reg:
            raise SlpError(lineno, "operand %d not yet defined" % i)
        if op == "pow":
            n = _slp_int(args[1], lineno, False)
            if n > _MAX_POW:
                raise SlpError(lineno, "exponent exceeds 2**63")
            program.append(("pow", i, n))
            continue
        j = _slp_int(args[1], lineno, False)
        if j >= reg:
            raise SlpError(lineno, "operand %d not yet defined" % j)
        program.append((op, i, j))
    if not program:
        raise SlpError(2, "program has no instructions")
    return tuple(program)


def dump_slp(program) -> str:
    """Canonical slp v1 text for a parsed program."""
    lines = ["slp 1"]
    for ins in program:
        lines.append(" ".join(str(x) for x in ins))
    return "\n".join(lines) + "\n"


def slp_mbb(program) -> MBB:
    """MBB that evaluates a straight-line program over Z/mZ.

    The program must come from parse_slp (or match its shape); the value
    of the last register is the oracle's answer.
    """

    def fn(a, m):
        regs = []
        for ins in program:
            op = ins[0]
            if op == "const":
                regs.append(ins[1] % m)
            elif op == "input":
                regs.append(a % m)
            elif op == "add":
                regs.append((regs[ins[1]] + regs[ins[2]]) % m)
            elif op == "sub":
                regs.append((regs[ins[1]] - regs[ins[2]]) % m)
            elif op == "mul":
                regs.append(regs[ins[1]] * regs[ins[2]] % m)
            else:
                regs.append(pow(regs[ins[1]], ins[2], m))
        return regs[-1]

    return MBB(fn)
