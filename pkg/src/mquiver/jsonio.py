"""JSON documents for quivers, matrices and Borel elements, plus verification reports.

Complex numbers are ``[re, im]`` pairs and matrices are row-major nested lists
of pairs. Floats are written with ``repr`` (shortest round-trip), so
save/load is bit-exact.
"""
import hashlib
import json
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidQuiver, MQuiverError, ParseError
from .quiver import Quiver, ScalarChain

SCHEMA = 1


def complex_to_json(z):
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(obj, where):
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return complex(obj)
    if (
        not isinstance(obj, list)
        or len(obj) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj)
    ):
        raise ParseError("expected a [re, im] pair", field=where)
    return complex(obj[0], obj[1])


def matrix_to_json(m):
    m = np.asarray(m, dtype=np.complex128)
    return [[complex_to_json(z) for z in row] for row in m]


def matrix_from_json(obj, where):
    if not isinstance(obj, list) or not obj or not all(isinstance(row, list) for row in obj):
        raise ParseError("expected a non-empty list of rows", field=where)
    width = len(obj[0])
    rows = []
    for i, row in enumerate(obj):
        if len(row) != width:
            raise ParseError(f"row has {len(row)} entries, expected {width}", field=f"{where}[{i}]")
        rows.append([complex_from_json(z, f"{where}[{i}][{j}]") for j, z in enumerate(row)])
    return np.array(rows, dtype=np.complex128).reshape(len(rows), width)


def _read_json(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc


def _write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, allow_nan=False)
        fh.write("\n")


def _require(doc, key, where="document"):
    if not isinstance(doc, dict):
        raise ParseError("expected a JSON object", field=where)
    if key not in doc:
        raise ParseError(f"missing field {key!r}", field=key)
    return doc[key]


def quiver_to_document(q, s=None, metadata=None):
    doc = {
        "schema": SCHEMA,
        "dims": list(q.dims),
        "alpha": [matrix_to_json(a) for a in q.alphas],
        "beta": [matrix_to_json(b) for b in q.betas],
    }
    if s is not None:
        doc["q"] = [complex_to_json(x) for x in s.q]
    if metadata:
        doc["metadata"] = dict(metadata)
    return doc


def quiver_from_document(doc):
    """Return ``(quiver, chain or None, metadata)``."""
    dims = _require(doc, "dims")
    if not isinstance(dims, list) or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
        raise ParseError("dims must be a list of integers", field="dims")
    alpha = _require(doc, "alpha")
    beta = _require(doc, "beta")
    if not isinstance(alpha, list) or not isinstance(beta, list):
        raise ParseError("alpha and beta must be lists of matrices", field="alpha/beta")
    alphas = tuple(matrix_from_json(m, f"alpha[{i}]") for i, m in enumerate(alpha))
    betas = tuple(matrix_from_json(m, f"beta[{i}]") for i, m in enumerate(beta))
    chain = None
    if "q" in doc:
        raw = doc["q"]
        if not isinstance(raw, list):
            raise ParseError("q must be a list", field="q")
        if len(raw) != len(dims) - 1:
            raise ParseError(f"q has length {len(raw)}, expected {len(dims) - 1}", field="q")
        values = tuple(complex_from_json(x, f"q[{i}]") for i, x in enumerate(raw))
        try:
            chain = ScalarChain(values)
        except MQuiverError as exc:
            raise ParseError(str(exc), field="q") from exc
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ParseError("metadata must be an object", field="metadata")
    quiver = Quiver(tuple(dims), alphas, betas)  # raises InvalidQuiver
    return quiver, chain, metadata


def save_quiver(q, path, s=None, metadata=None):
    _write_json(quiver_to_document(q, s, metadata), path)


def load_quiver_document(path):
    return quiver_from_document(_read_json(path))


def load_quiver(path):
    return load_quiver_document(path)[0]


def save_matrix(m, path, variant=None):
    doc = {"schema": SCHEMA, "matrix": matrix_to_json(m)}
    if variant is not None:
        doc["variant"] = variant
    _write_json(doc, path)


def load_matrix_document(path):
    """Return ``(matrix, variant or None)``."""
    doc = _read_json(path)
    m = matrix_from_json(_require(doc, "matrix"), "matrix")
    variant = doc.get("variant")
    if variant is not None and variant not in ("B", "B1"):
        raise ParseError(f"unknown variant {variant!r}", field="variant")
    return m, variant


def load_matrix(path):
    return load_matrix_document(path)[0]


def save_borel(b, path):
    save_matrix(b.m, path, b.variant)


def load_borel(path, default_variant="B1"):
    from .normal_form import BorelElement

    m, variant = load_matrix_document(path)
    return BorelElement(m, variant or default_variant)


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def digest(inputs):
    return hashlib.sha256(canonical_json(inputs).encode()).hexdigest()


@dataclass
class Report:
    """Named residuals with their tolerances; passes iff every residual is within tolerance."""

    operation: str
    inputs: dict
    residuals: dict
    tolerances: dict
    data: dict = field(default_factory=dict)
    indeterminate: bool = False
    tolerance: float = None

    @property
    def verdict(self):
        if self.indeterminate:
            return "indeterminate"
        ok = all(self.residuals[k] <= self.tolerances[k] for k in self.residuals)
        return "pass" if ok else "fail"

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "operation": self.operation,
            "inputs_digest": digest(self.inputs),
            "residuals": {k: _finite(v) for k, v in self.residuals.items()},
            "tolerances": dict(self.tolerances),
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "data": self.data,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=1, allow_nan=False)


def _finite(x):
    x = float(x)
    return x if np.isfinite(x) else 1e308


_COMPLEX_RE = re.compile(
    r"""^\s*(?:
        (?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
        (?:(?P<sign>[+-])(?P<im1>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?[ij])?
      |
        (?P<im2>[+-]?(?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?)[ij]
    )\s*$""",
    re.VERBOSE,
)


def parse_complex(text):
    """Parse ``a+bi`` style numbers: ``2``, ``-1.5``, ``3i``, ``-i``, ``1-2i``, ``1e-3+4j``."""
    m = _COMPLEX_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse complex number {text!r}")
    if m.group("re") is not None:
        real = float(m.group("re"))
        if m.group("sign") is None:
            return complex(real, 0.0)
        mag = float(m.group("im1")) if m.group("im1") else 1.0
        return complex(real, mag if m.group("sign") == "+" else -mag)
    im = m.group("im2")
    if im in ("", "+"):
        return 1j
    if im == "-":
        return -1j
    return complex(0.0, float(im))


def parse_complex_list(text):
    return [parse_complex(part) for part in text.split(",") if part.strip()]


_ANGLE_RE = re.compile(
    r"^\s*(?P<sign>[+-]?)\s*(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*(?P<pi>pi)?\s*(?:/\s*(?P<den>\d+\.?\d*))?\s*$"
)


def parse_angle(text):
    """Parse a real angle such as ``0.5``, ``pi/2``, ``-2pi/3`` or ``2*pi/3``."""
    m = _ANGLE_RE.match(text)
    if not m or (m.group("num") is None and m.group("pi") is None):
        raise ValueError(f"cannot parse angle {text!r}")
    val = float(m.group("num")) if m.group("num") else 1.0
    if m.group("pi"):
        val *= np.pi
    if m.group("den"):
        val /= float(m.group("den"))
    return -val if m.group("sign") == "-" else val


def parse_angle_list(text):
    return [parse_angle(part) for part in text.split(",") if part.strip()]


__all__ = [
    "InvalidQuiver",
    "ParseError",
    "Report",
    "load_borel",
    "load_matrix",
    "load_quiver",
    "load_quiver_document",
    "parse_angle",
    "parse_complex",
    "quiver_from_document",
    "quiver_to_document",
    "save_borel",
    "save_matrix",
    "save_quiver",
]
