"""Command-line surface.  Reports are `key: value` lines; exit 0 pass, 1 check failed, 2 usage/parse."""

from __future__ import annotations

import argparse
import json
import random
import sys

from .complexes import (FreeComplex, ThreeTermComplex, cohomology, dual_complex,
                        reduce_to_strict)
from .cyclotomic import simplify
from .groupring import FiniteAbelianGroup, GroupRingElement, StructuralError
from .linalg import PreconditionError
from .gmodule import fitting_ideal, is_reflexive, subsets
from .io import InstanceError, InstanceFile, element_to_obj, read_instance, serialize_instance

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class Report:
    def __init__(self, out):
        self.out = out
        self.ok = True

    def line(self, key, value):
        self.out.write("%s: %s\n" % (key, _fmt(value)))

    def check(self, key, value, witness=None):
        self.line(key, bool(value))
        if not value:
            self.ok = False
            if witness is not None:
                self.line(key + ".witness", witness)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, GroupRingElement):
        return json.dumps(element_to_obj(v), separators=(",", ":"))
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(simplify(v)) if not isinstance(v, str) else v


def _abelian(free, torsion):
    parts = ["Z^%d" % free if free > 1 else "Z"] if free else []
    parts += ["Z/%d" % q for q in torsion]
    return " x ".join(parts) if parts else "0"


def _wedge_label(S):
    return "^".join("b%d" % (i + 1) for i in S) if S else "1"


def _eta_expression(eta, t, a):
    terms = []
    for S, c in zip(subsets(t, a), eta):
        if c.is_zero():
            continue
        nz = [(g, simplify(x)) for g, x in zip(c.group.elements, c.coeffs) if simplify(x) != 0]
        if len(nz) == 1 and not any(nz[0][0]):
            coef = str(nz[0][1])
        else:
            coef = "(%r)" % c
        terms.append("%s*%s" % (coef, _wedge_label(S)))
    return " + ".join(terms) if terms else "0"


def _lattice_lines(rep, key, ideal):
    basis, den = ideal.canonical_basis()
    rep.line(key + ".basis", [[int(x) for x in r] for r in basis])
    rep.line(key + ".denominator", den)


# argument helpers ------------------------------------------------------------------

def _parse_x(spec, C):
    """'b1,b3' names standard generators of the middle term."""
    G = C.group
    out = []
    for tok in spec.replace(" ", "").split(","):
        if not tok:
            continue
        if not tok.startswith("b") or not tok[1:].isdigit():
            raise UsageError("--x expects generator names like b1,b2; got %r" % tok)
        i = int(tok[1:]) - 1
        if not 0 <= i < C.s2:
            raise UsageError("E_X_RANGE: generator %s out of range 1..%d" % (tok, C.s2))
        out.append([GroupRingElement.one(G) if j == i else GroupRingElement.zero(G) for j in range(C.s2)])
    return out


def _parse_element_token(G, tok):
    k = len(G.invariant_factors)
    if tok.startswith("g") and tok[1:].isdigit() and len(tok) - 1 == k:
        return tuple(int(c) for c in tok[1:])
    if k == 1 and tok.lstrip("-").isdigit():
        return (int(tok),)
    raise UsageError("cannot read group element %r" % tok)


def _parse_subgroup(spec, G):
    spec = spec.strip()
    try:
        if spec.startswith("["):
            gens = [tuple(int(a) for a in g) for g in json.loads(spec)]
        else:
            gens = [_parse_element_token(G, t) for t in spec.replace(" ", "").split(",") if t]
        return G.subgroup_elements(gens)
    except (ValueError, TypeError, StructuralError) as e:
        raise UsageError("E_SUBGROUP: %s" % e)


def _load(args):
    return read_instance(args.file)


def _three(inst):
    if not isinstance(inst.complex, ThreeTermComplex):
        raise UsageError("this command needs a three-term complex")
    return inst.complex


def _strict(inst):
    C = _three(inst)
    if C.s3:
        raise UsageError("this command needs a strict complex (s3 = 0); run `reduce` first")
    return C


def _lambda(inst, C):
    from .special import LambdaMap
    if inst.lam is None:
        return LambdaMap.identity(C)
    lam = LambdaMap(C.group, inst.lam)
    lam.check(C)
    return lam


def _X(args, inst, C):
    if getattr(args, "x", None):
        X = _parse_x(args.x, C)
    elif inst.X is not None:
        X = inst.X
    elif getattr(args, "a", None) is not None:
        X = _parse_x(",".join("b%d" % (i + 1) for i in range(args.a)), C)
    else:
        raise UsageError("give X through --x, --a or the instance file")
    if getattr(args, "a", None) is not None and len(X) != args.a:
        raise UsageError("--a %d does not match |X| = %d" % (args.a, len(X)))
    return X


# commands --------------------------------------------------------------------------

def cmd_cohomology(args, rep):
    inst = _load(args)
    C = inst.complex
    if isinstance(C, FreeComplex):
        summary = []
        for deg in C.degrees():
            M = C.cohomology_module(deg)
            desc = _abelian(M.free_rank(), M.torsion_invariants())
            rep.line("H%d" % deg, desc)
            summary.append("H%d = %s" % (deg, desc))
        rep.line("summary", ", ".join(summary))
        return
    data = cohomology(C)
    h1 = _abelian(data.H1.rank, [])
    h2 = _abelian(data.H2.free_rank(), data.H2.torsion_invariants())
    rep.line("H1", h1)
    rep.line("H2", h2)
    if C.s3:
        rep.line("H3", _abelian(data.H3.free_rank(), data.H3.torsion_invariants()))
    rep.line("ranks_by_character", data.ranks)
    rep.line("summary", "H1 = %s, H2 = %s" % (h1, h2))


def cmd_fitting(args, rep):
    inst = _load(args)
    C = _three(inst)
    H2 = cohomology(C).H2
    a_values = [args.a] if args.a is not None else list(range(H2.m + 1))
    for a in a_values:
        fit = fitting_ideal(H2, a)
        _lattice_lines(rep, "Fit^%d" % a, fit)
        if args.oracle:
            from .oracle import brute_force_fitting
            rep.check("Fit^%d.oracle_agrees" % a, brute_force_fitting(H2, a).agrees_with(fit))


def cmd_eta(args, rep):
    from .special import characteristic_element, check_defining_equation, special_element
    inst = _load(args)
    C = _strict(inst)
    lam = _lambda(inst, C)
    X = _X(args, inst, C)
    L = characteristic_element(C, lam)
    sd = special_element(C, lam, L, X, x_element=inst.x_element)
    a = len(X)
    rep.line("a", a)
    rep.line("L", L)
    rep.line("eta", _eta_expression(sd.eta, C.s1, a))
    for S, c in zip(subsets(C.s1, a), sd.eta):
        rep.line("eta[%s]" % _wedge_label(S), c)
    _lattice_lines(rep, "I(eta)", sd.I_eta)
    rep.check("defining_equation", check_defining_equation(C, lam, sd))
    if args.oracle:
        from .special import eta_via_minors
        try:
            mc = eta_via_minors(C, sd)
            rep.check("minor_formula_agrees", mc.agrees)
        except PreconditionError as e:
            rep.line("minor_formula", "skipped (%s)" % e)


_CHARELS_KEYS = [
    ("xI_in_Fit", "x I(eta) <= Fit^a"),
    ("xI_in_Ann_tor", "x I(eta) <= Ann(H2_tor)"),
    ("x_eta_in_bidual", "x eta in bidual"),
    ("wedge_H2_inclusion", "x (wedge H2) eta in bidual"),
    ("defining_equation", "defining equation"),
    ("e_a_eta_is_eta", "e_a eta == eta"),
    ("e_geq_a_is_one", "e_(a) == 1"),
    ("I_eta_equals_Fit", "I(eta) == Fit^a"),
]


def cmd_check_charels(args, rep):
    from .special import characteristic_element, check_charels
    inst = _load(args)
    C = _strict(inst)
    lam = _lambda(inst, C)
    X = _X(args, inst, C)
    L = characteristic_element(C, lam)
    r = check_charels(C, lam, L, X, x_element=inst.x_element)
    rep.line("a", len(X))
    rep.line("x", r["x"])
    rep.line("separable", r["separable"])
    for key, label in _CHARELS_KEYS:
        if key in r:
            wit = None
            if key in ("xI_in_Fit", "I_eta_equals_Fit") and not r[key]:
                wit = "I(eta)=%s Fit=%s" % (r["I_eta"].canonical_basis(), r["Fit"].canonical_basis())
            rep.check(label, r[key], wit)
    _lattice_lines(rep, "I(eta)", r["I_eta"])
    _lattice_lines(rep, "Fit^a", r["Fit"])
    if args.oracle:
        from .oracle import brute_force_fitting
        rep.check("Fit^a.oracle_agrees", brute_force_fitting(cohomology(C).H2, len(X)).agrees_with(r["Fit"]))


def cmd_pairing(args, rep):
    from .special import characteristic_element, pairing
    inst = _load(args)
    C = _strict(inst)
    lam = _lambda(inst, C)
    X = _X(args, inst, C)
    L = characteristic_element(C, lam)
    p = pairing(C, lam, L, X, x_element=inst.x_element)
    rep.line("left", _abelian(0, p.left_invariants))
    rep.line("right", _abelian(0, p.right_invariants))
    rep.line("matrix", p.matrix)
    for k in ("left_order", "right_order", "ses_orders"):
        rep.line(k, p.details[k])
    for k in ("left_radical_trivial", "right_radical_trivial", "orders_equal", "ses_exact"):
        rep.check(k, p.details[k])
    rep.check("perfect", p.perfect)
    if args.oracle:
        from .oracle import pairing_oracle
        rep.check("oracle_perfect", pairing_oracle(p.left_invariants, p.right_invariants, p.matrix))


def cmd_check_mrs(args, rep):
    from .complexes import QuotientGroup
    from .descent import check_mrs, make_datum
    inst = _load(args)
    C = _strict(inst)
    G = C.group
    if args.subgroup:
        J = _parse_subgroup(args.subgroup, G)
    elif inst.subgroup is not None:
        J = inst.subgroup
    else:
        raise UsageError("check-mrs needs --subgroup or a subgroup in the instance file")
    lam = _lambda(inst, C)
    X = _X(args, inst, C)
    qg = QuotientGroup(G, J)
    Q = qg.Q
    if inst.Xp is not None:
        Xp = [[qg.project_element(x) for x in v] for v in inst.Xp]
    else:
        ap = args.ap if args.ap is not None else len(X)
        Xp = [[GroupRingElement.one(Q) if j == i else GroupRingElement.zero(Q) for j in range(C.s1)]
              for i in range(ap)]
    datum = make_datum(C, J, X, Xp)
    r = check_mrs(datum, lam)
    rep.line("J", [list(j) for j in datum.J])
    rep.line("a", datum.a)
    rep.line("a'", datum.ap)
    rep.line("k", r.k)
    rep.line("sign", r.sign)
    for key in r.CORE:
        rep.check(key, r.checks.get(key, False), r.witness if key == "congruence" else None)
    for key in sorted(set(r.checks) - set(r.CORE)):
        rep.line(key, r.checks[key])
    rep.line("lhs", r.lhs)
    rep.line("rhs", r.rhs)


def cmd_reduce(args, rep):
    inst = _load(args)
    C = _three(inst)
    attempts = []
    if args.prime is not None:
        attempts = [args.prime]
    else:
        try:
            r = reduce_to_strict(C)
            _reduction_lines(rep, r, "")
            return
        except PreconditionError as e:
            rep.line("global", "failed (%s)" % e)
            h = cohomology(C).H3.order()
            attempts = [p for p in range(2, h + 1) if h % p == 0 and all(p % q for q in range(2, p))]
    for p in attempts:
        r = reduce_to_strict(C, prime=p)
        _reduction_lines(rep, r, "p%d." % p)


def _reduction_lines(rep, r, prefix):
    rep.line(prefix + "mode", r.mode)
    rep.line(prefix + "x", r.x)
    rep.line(prefix + "minor_columns", list(r.minor_columns))
    rep.line(prefix + "n", r.n)
    for k in sorted(r.checks):
        rep.check(prefix + k, r.checks[k])
    rep.line(prefix + "psi", r.C_x.psi)


def cmd_dual(args, rep):
    inst = _load(args)
    C = _strict(inst)
    D = dual_complex(C)
    DD = dual_complex(D)

    def inv(K):
        d = cohomology(K)
        return [d.H1.rank, d.H2.free_rank(), d.H2.torsion_invariants()]

    rep.check("H1_reflexive", is_reflexive(cohomology(C).H1))
    rep.line("H(C)", inv(C))
    rep.line("H(C*)", inv(D))
    rep.check("double_dual_matches", inv(DD) == inv(C))
    rep.line("dual.psi", D.psi)


def cmd_gen(args, rep):
    from .oracle import InstanceSpec, mrs_instance, random_instance, random_X
    group = tuple(int(n) for n in args.group.split(",") if n.strip()) if args.group else ()
    seed = args.seed if args.seed is not None else 0
    meta = {"seed": seed, "description": "generated %s instance" % args.shape}
    if args.shape == "mrs":
        G = FiniteAbelianGroup(group)
        J = _parse_subgroup(args.subgroup, G) if args.subgroup else G.elements
        a = args.a if args.a is not None else 1
        ap = args.ap if args.ap is not None else a + 1
        inst = mrs_instance(seed, group, d=args.d, a=a, ap=ap, J=J)
        from .complexes import QuotientGroup
        from .descent import lift_element
        qg = QuotientGroup(G, J)
        Xp = [[lift_element(qg, x) for x in v] for v in inst.extra["Xp"]]
        f = InstanceFile(G, inst.complex, lam=inst.lam.blocks, conductor=G.exponent, X=inst.X, Xp=Xp,
                         metadata=meta)
        f.subgroup = J
        f.subgroup_generators = [list(j) for j in J]
    else:
        spec = InstanceSpec(seed, group, d=args.d, shape=args.shape, separable=args.a if args.separable else None)
        inst = random_instance(spec)
        G = inst.complex.group
        f = InstanceFile(G, inst.complex, metadata=meta)
        if args.shape == "strict":
            f.lam = inst.lam.blocks
            f.conductor = G.exponent
            if args.a is not None:
                f.X = inst.X if args.separable else random_X(inst.complex, args.a, random.Random(seed))
    rep.out.write(serialize_instance(f))


def cmd_oracle(args, rep):
    from .groupring import char_coords, integrality_test
    from .gmodule import bidual
    from .oracle import brute_force_bidual, brute_force_fitting, bidual_agrees, direct_integrality
    from .special import characteristic_element
    inst = _load(args)
    C = _three(inst)
    data = cohomology(C)
    H2 = data.H2
    for a in range(min(H2.m, 3) + 1):
        try:
            ok = brute_force_fitting(H2, a).agrees_with(fitting_ideal(H2, a))
            rep.check("fitting[a=%d]" % a, ok)
        except PreconditionError as e:
            rep.line("fitting[a=%d]" % a, "skipped (%s)" % e)
    for a in range(min(data.H1.rank, 2) + 1):
        try:
            ok = bidual_agrees(brute_force_bidual(data.H1, a), bidual(data.H1, a).lattice)
            rep.check("bidual[a=%d]" % a, ok)
        except PreconditionError as e:
            rep.line("bidual[a=%d]" % a, "skipped (%s)" % e)
    if not C.s3:
        lam = _lambda(inst, C)
        L = characteristic_element(C, lam)
        for name, x in (("L", L), ("L^-1", None)):
            coords = char_coords(L) if x is not None else [simplify(1 / v) for v in char_coords(L)]
            rep.check("integrality[%s]" % name, integrality_test(C.group, coords) == direct_integrality(C.group, coords))


COMMANDS = {
    "cohomology": cmd_cohomology,
    "fitting": cmd_fitting,
    "eta": cmd_eta,
    "pairing": cmd_pairing,
    "check-charels": cmd_check_charels,
    "check-mrs": cmd_check_mrs,
    "reduce": cmd_reduce,
    "dual": cmd_dual,
    "gen": cmd_gen,
    "oracle": cmd_oracle,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="hse", description="Higher special elements for complexes over Z[G].")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        if name != "gen":
            s.add_argument("file")
        s.add_argument("--a", type=int)
        s.add_argument("--ap", type=int, help="size of X' for check-mrs and gen --shape mrs")
        s.add_argument("--x", help="X as generator names, e.g. b1,b2")
        s.add_argument("--subgroup", help="generators of J, e.g. g1 or g10,g01 or [[1,0]]")
        s.add_argument("--seed", type=int)
        s.add_argument("--prime", type=int, help="p-local reduction")
        s.add_argument("--oracle", action="store_true", help="cross-check against brute-force oracles")
        if name == "gen":
            s.add_argument("--group", default="", help="invariant factors, e.g. 2,2")
            s.add_argument("--d", type=int, default=2)
            s.add_argument("--shape", choices=["strict", "three", "finite", "mrs"], default="strict")
            s.add_argument("--separable", action="store_true")
    return p


def run_command(argv, out=None):
    out = out if out is not None else sys.stdout
    rep = Report(out)
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.command](args, rep)
    except (UsageError, InstanceError, OSError) as e:
        out.write("error: %s\n" % e)
        return EXIT_USAGE
    except PreconditionError as e:
        out.write("precondition_failed: %s\n" % e)
        wit = getattr(e, "witness", None)
        if wit is not None:
            out.write("witness: %s\n" % _fmt(wit))
        return EXIT_FAIL
    return EXIT_OK if rep.ok else EXIT_FAIL


def main():
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
