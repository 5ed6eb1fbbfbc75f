"""Instance files: a JSON document with exact numbers written as strings.

Grammar (all keys except "group" and "complex" optional):

    {
      "group": [n_1, ..., n_k],
      "complex": {"shape": "strict", "psi": MATRIX}
               | {"shape": "three", "s1": int, "s2": int, "s3": int, "d1": MATRIX, "d2": MATRIX}
               | {"shape": "finite", "ranks": [r0, r1, r2], "diffs": [MATRIX, MATRIX]},
      "lambda": {"conductor": e, "blocks": [BLOCK per character]},
      "X": [VECTOR, ...],
      "Xp": [VECTOR, ...],
      "subgroup": [[g_1...], ...],
      "x_element": ELEMENT,
      "metadata": {...}
    }

An ELEMENT maps group elements written "[a,b]" to coefficients ("3", "-1/2");
a VECTOR is a list of ELEMENTs and a MATRIX a list of row VECTORs.  A BLOCK is a
square list of lists of SCALARs, where a SCALAR is a rational string or a map
{"k": coefficient} standing for sum coefficient * zeta_e^k.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .complexes import FreeComplex, StrictComplex, ThreeTermComplex, cohomology
from .cyclotomic import Cyc, simplify
from .groupring import FiniteAbelianGroup, GroupRingElement, StructuralError


class InstanceError(ValueError):
    """Malformed instance; code is a stable name such as E_SYNTAX or E_LAMBDA_SHAPE."""

    def __init__(self, code, msg, line=None, col=None):
        loc = "" if line is None else " (line %d, column %d)" % (line, col)
        super().__init__("%s: %s%s" % (code, msg, loc))
        self.code = code
        self.line = line
        self.col = col


@dataclass
class InstanceFile:
    group: FiniteAbelianGroup
    complex: object
    lam: list = None
    conductor: int = None
    X: list = None
    Xp: list = None
    subgroup: list = None
    x_element: GroupRingElement = None
    metadata: dict = field(default_factory=dict)


# scalars and elements ------------------------------------------------------------

def _fraction(s, where):
    if isinstance(s, bool):
        raise InstanceError("E_NUMBER", "bad number %r at %s" % (s, where))
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        try:
            return Fraction(s.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise InstanceError("E_NUMBER", "bad number %r at %s" % (s, where))


def _fmt(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else "%d/%d" % (q.numerator, q.denominator)


def _parse_label(G, key, where):
    try:
        g = tuple(json.loads(key))
    except (ValueError, TypeError):
        raise InstanceError("E_ELEMENT", "bad group element label %r at %s" % (key, where))
    if len(g) != len(G.invariant_factors) or any(not isinstance(a, int) for a in g):
        raise InstanceError("E_ELEMENT", "label %r does not name an element of %r at %s" % (key, G, where))
    return tuple(a % n for a, n in zip(g, G.invariant_factors))


def _label(g):
    return "[" + ",".join(str(a) for a in g) + "]"


def parse_element(G, obj, where="element"):
    if isinstance(obj, (int, str)) and not isinstance(obj, bool):
        return GroupRingElement.scalar(G, _fraction(obj, where))
    if isinstance(obj, list):
        # alternative form: [[residues], coefficient] pairs
        try:
            obj = {json.dumps(list(g)): c for g, c in obj}
        except (TypeError, ValueError):
            raise InstanceError("E_ELEMENT", "expected [[residues], coefficient] pairs at %s" % where)
    if not isinstance(obj, dict):
        raise InstanceError("E_ELEMENT", "expected a map from group elements to coefficients at %s" % where)
    coeffs = [Fraction(0)] * G.order
    for k, v in obj.items():
        g = _parse_label(G, k, where)
        coeffs[G.index(g)] += _fraction(v, where)
    return GroupRingElement(G, coeffs)


def element_to_obj(x):
    G = x.group
    return {_label(g): _fmt(simplify(c)) for g, c in zip(G.elements, x.coeffs) if simplify(c) != 0}


def parse_matrix(G, obj, rows, cols, where):
    if not isinstance(obj, list) or len(obj) != rows:
        raise InstanceError("E_SHAPE", "%s must have %d rows" % (where, rows))
    out = []
    for i, r in enumerate(obj):
        if not isinstance(r, list) or len(r) != cols:
            raise InstanceError("E_SHAPE", "%s row %d must have %d entries" % (where, i, cols))
        out.append([parse_element(G, e, "%s[%d][%d]" % (where, i, j)) for j, e in enumerate(r)])
    return out


def matrix_to_obj(M):
    return [[element_to_obj(x) for x in r] for r in M]


def _parse_scalar(obj, e, where):
    if isinstance(obj, dict):
        if e is None or e <= 2:
            raise InstanceError("E_LAMBDA_SHAPE", "cyclotomic entry needs a conductor > 2 at %s" % where)
        z = Cyc.from_rational(e, 0)
        for k, v in obj.items():
            try:
                kk = int(k)
            except ValueError:
                raise InstanceError("E_NUMBER", "bad zeta exponent %r at %s" % (k, where))
            z = z + Cyc.zeta(e, kk) * _fraction(v, where)
        return simplify(z)
    return _fraction(obj, where)


def _scalar_to_obj(x):
    x = simplify(x)
    if isinstance(x, Cyc):
        return {str(k): _fmt(c) for k, c in enumerate(x.c) if c != 0}
    return _fmt(x)


# documents -------------------------------------------------------------------------

def _parse_complex(G, obj):
    if not isinstance(obj, dict) or "shape" not in obj:
        raise InstanceError("E_COMPLEX", "complex needs a shape")
    shape = obj["shape"]
    try:
        if shape == "strict":
            psi = obj.get("psi")
            if not isinstance(psi, list):
                raise InstanceError("E_SHAPE", "psi must be a square matrix")
            d = len(psi)
            return StrictComplex(G, parse_matrix(G, psi, d, d, "psi"))
        if shape == "three":
            s1, s2, s3 = (int(obj[k]) for k in ("s1", "s2", "s3"))
            d1 = parse_matrix(G, obj["d1"], s2, s1, "d1")
            d2 = parse_matrix(G, obj["d2"], s3, s2, "d2")
            return ThreeTermComplex(G, s1, s2, s3, d1, d2)
        if shape == "finite":
            ranks = [int(r) for r in obj["ranks"]]
            diffs = [parse_matrix(G, m, ranks[i + 1], ranks[i], "diffs[%d]" % i) if ranks[i] else
                     [[] for _ in range(ranks[i + 1])] for i, m in enumerate(obj["diffs"])]
            return FreeComplex(G, int(obj.get("start", 0)), ranks, diffs)
    except KeyError as e:
        raise InstanceError("E_COMPLEX", "missing field %s" % e)
    except StructuralError as e:
        raise InstanceError("E_COMPLEX", str(e))
    raise InstanceError("E_COMPLEX", "unknown shape %r" % shape)


def _complex_to_obj(C):
    if isinstance(C, StrictComplex):
        return {"shape": "strict", "psi": matrix_to_obj(C.psi)}
    if isinstance(C, ThreeTermComplex):
        return {"shape": "three", "s1": C.s1, "s2": C.s2, "s3": C.s3,
                "d1": matrix_to_obj(C.d1), "d2": matrix_to_obj(C.d2)}
    return {"shape": "finite", "start": C.start, "ranks": list(C.ranks),
            "diffs": [matrix_to_obj(d) for d in C.diffs]}


def parse_instance(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError("E_SYNTAX", e.msg, e.lineno, e.colno)
    if not isinstance(doc, dict):
        raise InstanceError("E_SYNTAX", "top level must be an object", 1, 1)
    if "group" not in doc or "complex" not in doc:
        raise InstanceError("E_MISSING", "an instance needs 'group' and 'complex'")
    try:
        G = FiniteAbelianGroup(doc["group"])
    except (StructuralError, TypeError, ValueError) as e:
        raise InstanceError("E_GROUP", str(e))
    C = _parse_complex(G, doc["complex"])
    inst = InstanceFile(G, C, metadata=dict(doc.get("metadata", {})))
    if "lambda" in doc:
        lam = doc["lambda"]
        if not isinstance(lam, dict) or "blocks" not in lam:
            raise InstanceError("E_LAMBDA_SHAPE", "lambda needs blocks")
        e = lam.get("conductor")
        blocks = lam["blocks"]
        if not isinstance(C, ThreeTermComplex):
            raise InstanceError("E_LAMBDA_SHAPE", "lambda is only meaningful for three-term complexes")
        ranks = cohomology(C).ranks
        if not isinstance(blocks, list) or len(blocks) != G.order:
            raise InstanceError("E_LAMBDA_SHAPE", "lambda needs %d blocks, one per character" % G.order)
        parsed = []
        for ci, (b, r) in enumerate(zip(blocks, ranks)):
            if not isinstance(b, list) or len(b) != r or any(not isinstance(row, list) or len(row) != r for row in b):
                raise InstanceError("E_LAMBDA_SHAPE", "block %d must be %d x %d" % (ci, r, r))
            parsed.append([[_parse_scalar(x, e, "lambda[%d]" % ci) for x in row] for row in b])
        inst.lam = parsed
        inst.conductor = e
    size = C.s2 if isinstance(C, ThreeTermComplex) else None
    for key in ("X", "Xp"):
        if key in doc:
            if size is None:
                raise InstanceError("E_X_RANGE", "%s needs a three-term complex" % key)
            vecs = doc[key]
            if not isinstance(vecs, list):
                raise InstanceError("E_X_RANGE", "%s must be a list of vectors" % key)
            out = []
            for i, v in enumerate(vecs):
                if not isinstance(v, list) or len(v) != size:
                    raise InstanceError("E_X_RANGE", "%s[%d] must have %d coordinates" % (key, i, size))
                out.append([parse_element(G, x, "%s[%d]" % (key, i)) for x in v])
            setattr(inst, key, out)
    if "subgroup" in doc:
        try:
            gens = [tuple(int(a) for a in g) for g in doc["subgroup"]]
            inst.subgroup = G.subgroup_elements(gens)
        except (StructuralError, TypeError, ValueError) as e:
            raise InstanceError("E_SUBGROUP", str(e))
        inst.subgroup_generators = gens
    if "x_element" in doc:
        inst.x_element = parse_element(G, doc["x_element"], "x_element")
    return inst


def serialize_instance(inst):
    doc = {"group": list(inst.group.invariant_factors), "complex": _complex_to_obj(inst.complex)}
    if inst.lam is not None:
        doc["lambda"] = {"conductor": inst.conductor if inst.conductor is not None else inst.group.exponent,
                         "blocks": [[[_scalar_to_obj(x) for x in row] for row in b] for b in inst.lam]}
    if inst.X is not None:
        doc["X"] = matrix_to_obj(inst.X)
    if inst.Xp is not None:
        doc["Xp"] = matrix_to_obj(inst.Xp)
    if inst.subgroup is not None:
        doc["subgroup"] = [list(g) for g in getattr(inst, "subgroup_generators", inst.subgroup)]
    if inst.x_element is not None:
        doc["x_element"] = element_to_obj(inst.x_element)
    if inst.metadata:
        doc["metadata"] = inst.metadata
    return json.dumps(doc, indent=1) + "\n"


def read_instance(path):
    with open(path) as fh:
        return parse_instance(fh.read())
