"""
K-expression grammar.

An expression is a sum of terms

    gauss(a=1, c=[1, 0], w=0.8)     a exp(-|x - c|^2 / w^2)
    rational(a=1, c=0, w=1)         a / (1 + |x - c|^2 / w^2)
    cusp(amp=1, a=1, beta=1.5, c=0) amp exp(-|x - c|^2 - a sum |x_j - c_j|^beta)
    0.5                             constant

joined with + and -. Anything outside the grammar is accepted as a raw
numpy expression in x1..xn, r (= |x|) and r2 (= |x|^2), evaluated from a
whitelisted AST with finite-difference derivatives.
"""

import ast
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from ..config import settings
from ..config.run_config import KSpec
from ..utils.logger import logger
from .curvature import CurvatureField, K6Data, builtin_field

TERM_PARAMS: Dict[str, Tuple[str, ...]] = {
    "gauss": ("a", "c", "w"),
    "rational": ("a", "c", "w"),
    "cusp": ("amp", "a", "beta", "c"),
}

TERM_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "gauss": {"a": 1.0, "c": 0.0, "w": 1.0},
    "rational": {"a": 1.0, "c": 0.0, "w": 1.0},
    "cusp": {"amp": 1.0, "a": 1.0, "beta": 1.5, "c": 0.0},
}

RAW_FUNCTIONS: Dict[str, Callable] = {
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "sin": np.sin,
    "cos": np.cos,
    "tanh": np.tanh,
    "arctan": np.arctan,
    "abs": np.abs,
}

RAW_NODES = (
    ast.Expression,
    ast.BinOp,
    ast.UnaryOp,
    ast.Call,
    ast.Name,
    ast.Load,
    ast.Constant,
    ast.Add,
    ast.Sub,
    ast.Mult,
    ast.Div,
    ast.Pow,
    ast.USub,
    ast.UAdd,
)


class _GrammarMiss(Exception):
    """Raised internally when the text falls outside the term grammar."""


@dataclass
class Term:
    kind: str
    sign: float
    args: Dict[str, Any]


def _literal(node: ast.AST) -> Any:
    try:
        return ast.literal_eval(node)
    except ValueError:
        raise _GrammarMiss(ast.dump(node))


def _collect_terms(node: ast.AST, sign: float, out: List[Term]) -> None:
    if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub)):
        _collect_terms(node.left, sign, out)
        _collect_terms(node.right, sign if isinstance(node.op, ast.Add) else -sign, out)
    elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        _collect_terms(node.operand, -sign if isinstance(node.op, ast.USub) else sign, out)
    elif isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        out.append(Term("const", sign, {"value": float(node.value)}))
    elif isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in TERM_PARAMS:
        kind = node.func.id
        names = TERM_PARAMS[kind]
        if len(node.args) > len(names):
            raise _GrammarMiss(kind)
        args = dict(TERM_DEFAULTS[kind])
        for name, arg in zip(names, node.args):
            args[name] = _literal(arg)
        for kw in node.keywords:
            if kw.arg not in names:
                raise _GrammarMiss(f"{kind}({kw.arg}=)")
            args[kw.arg] = _literal(kw.value)
        out.append(Term(kind, sign, args))
    else:
        raise _GrammarMiss(ast.dump(node))


def _center(c: Any, n: int) -> np.ndarray:
    from ..utils.exceptions import ValidationError

    arr = np.atleast_1d(np.asarray(c, dtype=float))
    if arr.size == 1:
        return np.full(n, float(arr[0]))
    if arr.shape != (n,):
        raise ValidationError(f"Center {c!r} is not a point in R^{n}", "K.expression", f"list of {n} reals")
    return arr


def _term_funcs(term: Term, n: int):
    """(f, grad, hess, center) for one grammar term."""
    k = term.sign
    eye = np.eye(n)
    if term.kind == "const":
        v = k * term.args["value"]
        return (
            lambda x: np.full(x.shape[:-1], v),
            lambda x: np.zeros_like(x),
            lambda x: np.zeros(x.shape + (n,)),
            None,
        )
    c = _center(term.args["c"], n)
    if term.kind == "gauss":
        a, w2 = k * float(term.args["a"]), float(term.args["w"]) ** 2

        def f(x):
            return a * np.exp(-np.sum((x - c) ** 2, axis=-1) / w2)

        def g(x):
            return (-2.0 / w2) * (x - c) * f(x)[..., None]

        def h(x):
            y = x - c
            return f(x)[..., None, None] * (4.0 / w2**2 * y[..., :, None] * y[..., None, :] - 2.0 / w2 * eye)

        return f, g, h, c
    if term.kind == "rational":
        a, w2 = k * float(term.args["a"]), float(term.args["w"]) ** 2

        def q(x):
            return 1.0 + np.sum((x - c) ** 2, axis=-1) / w2

        def f(x):
            return a / q(x)

        def g(x):
            return -2.0 * a * (x - c) / (w2 * q(x) ** 2)[..., None]

        def h(x):
            y = x - c
            qq = q(x)[..., None, None]
            return -2.0 * a * eye / (w2 * qq**2) + 8.0 * a * y[..., :, None] * y[..., None, :] / (w2**2 * qq**3)

        return f, g, h, c
    # cusp
    amp = k * float(term.args["amp"])
    base = builtin_field("cusp", n, {"a": float(term.args["a"]), "beta": float(term.args["beta"])})
    return (
        lambda x: amp * base.func(x - c),
        lambda x: amp * base.grad_func(x - c),
        lambda x: amp * base.hessian_func(x - c),
        c,
    )


def _grammar_field(text: str, terms: List[Term], n: int, eta: float) -> CurvatureField:
    parts = [_term_funcs(t, n) for t in terms]

    def f(x):
        return sum(p[0](x) for p in parts)

    def g(x):
        return sum(p[1](x) for p in parts)

    def h(x):
        return sum(p[2](x) for p in parts)

    cusps = [t for t in terms if t.kind == "cusp"]
    k6 = None
    if len(cusps) == 1:
        t = cusps[0]
        coef = -float(t.args["a"]) * t.sign * float(t.args["amp"])
        c = _center(t.args["c"], n)
        inner = builtin_field("cusp", n, {"a": float(t.args["a"]), "beta": float(t.args["beta"])})
        k6 = K6Data(
            float(t.args["beta"]),
            lambda xi: coef * float(inner.func(np.asarray(xi, dtype=float) - c)) * np.ones(n),
        )

    constant = sum(t.sign * t.args["value"] for t in terms if t.kind == "const")
    bound = sum(abs(float(t.args.get("a" if t.kind != "cusp" else "amp", 0.0))) for t in terms if t.kind != "const")
    return CurvatureField(
        name=text,
        n=n,
        func=f,
        grad_func=g,
        hessian_func=h,
        eta=eta,
        tail_value=float(constant),
        bound=float(bound + abs(constant)),
        seeds=[p[3] for p in parts if p[3] is not None],
        k6=k6,
        smooth_hessian=not cusps,
        options={"expression": text},
    )


def _raw_field(text: str, tree: ast.Expression, n: int, eta: float) -> CurvatureField:
    from ..utils.exceptions import ValidationError

    names = {f"x{i + 1}" for i in range(n)} | {"r", "r2", "pi"} | set(RAW_FUNCTIONS)
    if n == 1:
        names.add("x")
    for node in ast.walk(tree):
        if not isinstance(node, RAW_NODES):
            raise ValidationError(
                f"Disallowed syntax {type(node).__name__} in K expression '{text}'",
                "K.expression",
                "arithmetic in x1..xn, r, r2",
            )
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise ValidationError(
                f"Non-numeric constant {node.value!r} in K expression '{text}'",
                "K.expression",
                "numeric literal",
            )
        if isinstance(node, ast.Name) and node.id not in names:
            raise ValidationError(
                f"Unknown name '{node.id}' in K expression '{text}'",
                "K.expression",
                f"one of {sorted(names)}",
            )
        if isinstance(node, ast.Call) and not (
            isinstance(node.func, ast.Name) and node.func.id in RAW_FUNCTIONS
        ):
            raise ValidationError(
                f"Only {sorted(RAW_FUNCTIONS)} may be called in K expressions",
                "K.expression",
                "whitelisted function",
            )
    code = compile(tree, "<K expression>", "eval")

    def f(x):
        env: Dict[str, Any] = dict(RAW_FUNCTIONS)
        env.update({f"x{i + 1}": x[..., i] for i in range(n)})
        r2 = np.sum(x * x, axis=-1)
        env.update({"r": np.sqrt(r2), "r2": r2, "pi": np.pi})
        if n == 1:
            env["x"] = x[..., 0]
        out = eval(code, {"__builtins__": {}}, env)  # noqa: S307 - AST whitelisted above
        return np.broadcast_to(np.asarray(out, dtype=float), x.shape[:-1])

    logger.warning(
        f"⚠️ WARN: K expression '{text}' is outside the term grammar; "
        "derivatives use finite differences"
    )
    return CurvatureField(
        name=text,
        n=n,
        func=f,
        eta=eta,
        tail_value=None,
        bound=None,
        seeds=[np.zeros(n)],
        options={"expression": text, "finite_difference": True},
    )


def parse_expression(text: str, n: int, eta: Optional[float] = None) -> CurvatureField:
    """
    Build a CurvatureField from an expression string.

    Args:
        text: Expression in the term grammar or a raw numpy expression
        n: Dimension
        eta: (K1) radius; defaults to DEFAULT_ETA

    Returns:
        CurvatureField with analytic derivatives for grammar expressions

    Raises:
        ValidationError: On syntax errors or disallowed constructs
    """
    from ..utils.exceptions import ValidationError

    eta = settings.DEFAULT_ETA if eta is None else float(eta)
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as e:
        raise ValidationError(f"Cannot parse K expression '{text}': {e.msg}", "K.expression", "expression")

    terms: List[Term] = []
    try:
        _collect_terms(tree.body, 1.0, terms)
    except _GrammarMiss:
        return _raw_field(text, tree, n, eta)
    return _grammar_field(text, terms, n, eta)


def field_from_spec(spec: KSpec, n: int) -> CurvatureField:
    """Resolve a run-config K entry to a CurvatureField."""
    if spec.builtin is not None:
        return builtin_field(spec.builtin, n, spec.options, spec.eta)
    return parse_expression(spec.expression, n, spec.eta)


__all__ = ["field_from_spec", "parse_expression"]
