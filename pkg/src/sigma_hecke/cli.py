"""Command-line entry point.  Every command prints one JSON report.

Exit codes: 0 all checks pass, 1 a check or internal contract failed,
2 usage error (bad flags, unparsable input, violated preconditions).
"""
from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
import time
from fractions import Fraction
from typing import Callable

from . import __version__
from .arith import (PrimeSet, crt_approximate, discreteness_gap, in_localization,
                    unit_decompose, vp)
from .chains import boundary_matrix, essential_acyclicity_probe, reduced_homology, reduced_homology_full
from .config import RunConfig, load_config_file, resolve_config
from .errors import ContractViolation, ExceedsCap, SigmaHeckeError
from .groups import (BaumslagSolitar, Character, Group, IntegerLine, Triangular, cayley_ball,
                     char_eval, character_basis, parse_character, parse_group, random_element,
                     unipotent_conjugation_check, word_lengths)
from .hecke import (coset_ball, coset_canonical, commensuration_indices, core_escape, hecke_pair,
                    induced_char, lambda_sample, random_core_element, schlichting_truncation,
                    transversal_witness)
from .linalg import RingSpec
from .sigma import (CITATIONS, Verdict, bs_sigma_classify, build_coset_filtration,
                    build_group_filtration, phi_psi_roundtrip, schesler_classify)
from .simplicial import TranslateFamily, pi0
from .vietoris import (VRWindow, cofinality_check, vr_h0_probe, word_metric_window,
                       zero_skeleton_invariance)

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


class Checks:
    def __init__(self):
        self.items: list[dict] = []

    def add(self, name: str, ok: bool, **detail) -> None:
        self.items.append({"name": name, "ok": bool(ok), "detail": detail})

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.items)


def default_character(group: Group, text: str | None) -> Character:
    if text:
        return parse_character(group, text)
    if isinstance(group, Triangular):
        return character_basis(group.n, group.primes)[0]
    return Character(group, (1,))


# -- verify suites ----------------------------------------------------------------------

def verify_arith(cfg: RunConfig, group: Group) -> Checks:
    rng = random.Random(cfg.seed)
    checks = Checks()
    bad = 0
    for _ in range(cfg.samples):
        P = PrimeSet.of(*rng.sample([2, 3, 5, 7], rng.randint(1, 4)))
        m = rng.randint(0, 6)
        targets = {p: Fraction(rng.randint(-500, 500), rng.choice([1, 2, 3, 4, 5, 7, 9, 25])) for p in P}
        x = crt_approximate(targets, m, P)
        if not in_localization(x, P) or any(vp(x - targets[p], p) < m for p in P):
            bad += 1
    checks.add("crt_postcondition", bad == 0, instances=cfg.samples, failures=bad)
    bad = 0
    for _ in range(10 * cfg.samples):
        P = PrimeSet.of(*rng.sample([2, 3, 5, 7], rng.randint(1, 4)))

        def unit():
            q = Fraction(rng.choice((1, -1)))
            for p in P:
                q *= Fraction(p) ** rng.randint(-4, 4)
            return q
        x, y = unit(), unit()
        if x == y:
            continue
        p, v = discreteness_gap(x, y, P)
        if not v <= vp(x, p) + 1:
            bad += 1
    checks.add("discreteness_gap", bad == 0, failures=bad)
    bad = 0
    for _ in range(cfg.samples):
        P = PrimeSet.of(*rng.sample([2, 3, 5, 7], rng.randint(1, 4)))
        q = Fraction(rng.choice((1, -1)))
        for p in P:
            q *= Fraction(p) ** rng.randint(-5, 5)
        bad += unit_decompose(q, P).value() != q
    checks.add("unit_roundtrip", bad == 0, failures=bad)
    return checks


def _ball_radius(cfg: RunConfig, group: Group) -> int:
    return min(cfg.radius, 2) if isinstance(group, Triangular) else cfg.radius


def verify_groups(cfg: RunConfig, group: Group) -> Checks:
    rng = random.Random(cfg.seed)
    checks = Checks()
    e = group.identity()
    sample = [random_element(group, rng, rng.randint(0, 8)) for _ in range(cfg.samples)]
    checks.add("inverse", all(group.multiply(g, group.inverse(g)) == e for g in sample))
    triples = [(rng.choice(sample), rng.choice(sample), rng.choice(sample)) for _ in range(cfg.samples)]
    checks.add("associativity", all(group.product(group.multiply(a, b), c) == group.multiply(a, group.multiply(b, c))
                                    for a, b, c in triples))
    chi = default_character(group, cfg.char)
    checks.add("character_additive", all(char_eval(chi, group.multiply(a, b)) == char_eval(chi, a) + char_eval(chi, b)
                                         for a, b, _ in triples) and char_eval(chi, e) == 0)
    R = _ball_radius(cfg, group)
    sizes = [len(word_lengths(group, r)) for r in range(R + 1)]
    mono = all(word_lengths(group, r).keys() <= word_lengths(group, r + 1).keys() for r in range(R))
    closed = all(group.inverse(g) in word_lengths(group, R) for g in word_lengths(group, R))
    checks.add("ball_monotone_and_symmetric", mono and closed, sizes=sizes)
    if isinstance(group, BaumslagSolitar):
        cb = cayley_ball(group, R)
        lines, skipped = cb.line_counts()
        counts = sorted({(lc.up, lc.down) for lc in lines})
        checks.add("a_line_counts", counts == [(abs(group.n), abs(group.m))] if lines else True,
                   lines=len(lines), skipped=skipped, counts=[list(c) for c in counts])
        deep = [v for v, d in cb.lengths.items() if d <= R - 2 - max(abs(group.m), abs(group.n))]
        checks.add("relator_closes", all(cb.relator_closes(v) for v in deep), vertices=len(deep))
        interior = [v for v in cb.lengths if cb.is_interior(v)]
        checks.add("interior_degree_4", all(cb.degree(v) == 4 for v in interior))
    if isinstance(group, Triangular):
        exps = []
        for p in group.primes:
            for i in range(1, group.n + 1):
                for j in range(i + 1, group.n + 1):
                    exps.append(unipotent_conjugation_check(group.n, group.primes, p, i, j, Fraction(1, p)) == p * p)
        checks.add("unipotent_conjugation", all(exps), combinations=len(exps))
        basis = character_basis(group.n, group.primes)
        ok = True
        for _ in range(cfg.samples // 2):
            g = e
            for _ in range(rng.randint(1, 5)):
                i = rng.randint(1, group.n - 1)
                j = rng.randint(i + 1, group.n)
                g = group.multiply(g, group.elementary(i, j, Fraction(rng.randint(-9, 9), rng.choice(group.primes.primes))))
            ok &= all(char_eval(b, g) == 0 for b in basis)
        checks.add("basis_vanishes_on_unipotents", ok, basis_size=len(basis))
    return checks


def verify_hecke(cfg: RunConfig, group: Group) -> Checks:
    rng = random.Random(cfg.seed)
    checks = Checks()
    pair = hecke_pair(group)
    G = group
    indices = {}
    try:
        for name, s in G.generators():
            indices[name] = list(commensuration_indices(pair, s, cfg.orbit_cap))
        checks.add("commensuration_indices", True, pairs=indices)
    except ExceedsCap as exc:
        checks.add("commensuration_indices", False, exceeded=str(exc), explored=exc.explored, cap=exc.cap)
    sample = [random_element(G, rng, rng.randint(0, 6)) for _ in range(cfg.samples)]
    ok = True
    for g in sample:
        lam = lambda_sample(pair, rng, rng.randint(0, 5))
        c = coset_canonical(pair, g)
        ok &= coset_canonical(pair, c) == c and coset_canonical(pair, G.multiply(g, lam)) == c
        ok &= pair.same_coset(g, c)
    checks.add("coset_canonical", ok)
    C = list(word_lengths(G, 2)) if isinstance(G, BaumslagSolitar) else [s for _, s in G.generators()]
    w = transversal_witness(pair, C, samples=cfg.samples, seed=cfg.seed, cap=cfg.orbit_cap)
    checks.add("transversal_witness", w.ok, size=len(w.F), checked=w.checked)
    ball = coset_ball(pair, min(cfg.coset_radius, 2 if isinstance(G, Triangular) else cfg.coset_radius))
    chi = default_character(G, cfg.char)
    well, add, tested = True, True, 0
    for _ in range(cfg.samples):
        g, h = rng.choice(sample), rng.choice(sample)
        sg, sh = schlichting_truncation(pair, g, ball), schlichting_truncation(pair, h, ball)
        comp = sg.compose(sh)
        if pair.base() not in comp.mapping:
            continue
        tested += 1
        well &= char_eval(chi, g) == induced_char(pair, chi, sg) if pair.base() in sg.mapping else True
        add &= induced_char(pair, chi, comp) == char_eval(chi, g) + char_eval(chi, h)
    checks.add("induced_char", well and add, composable_pairs=tested)
    if isinstance(G, Triangular):
        fails = 0
        for _ in range(cfg.samples // 2):
            A = random_core_element(G.n, rng)
            try:
                core_escape(G.n, G.primes, A)
            except ContractViolation:
                fails += 1
        checks.add("core_escape", fails == 0, samples=cfg.samples // 2)
    return checks


def _random_family(rng: random.Random, nverts: int) -> TranslateFamily:
    verts = list(range(nverts))
    parts = [rng.sample(verts, rng.randint(1, nverts)) for _ in range(rng.randint(1, 4))]
    return TranslateFamily.of(*parts)


def verify_chains(cfg: RunConfig, group: Group) -> Checks:
    rng = random.Random(cfg.seed)
    checks = Checks()
    rings = [RingSpec.parse(x) for x in ("Z", "Q", "F2", "F3")]
    agree, dd = True, True
    for _ in range(min(cfg.samples, 40)):
        fam = _random_family(rng, rng.randint(1, cfg.max_vertices))
        for k in (0, 1):
            agree &= reduced_homology(fam, k) == reduced_homology_full(fam, k)
        d1, d2 = boundary_matrix(fam, 1), boundary_matrix(fam, 2)
        dd &= d1.matmul(d2).is_zero() and boundary_matrix(fam, 0).matmul(d1).is_zero()
    checks.add("normalized_vs_full", agree)
    checks.add("boundary_squared_zero", dd)
    acyclic = all(reduced_homology(TranslateFamily.of(range(n)), k, R).is_zero
                  for n in range(1, 5) for k in range(3) for R in rings)
    checks.add("simplex_acyclic", acyclic)
    hollow = reduced_homology(TranslateFamily.of({0, 1}, {1, 2}, {0, 2}), 1)
    checks.add("hollow_triangle", hollow.rank == 1 and not hollow.torsion)
    return checks


def verify_sigma(cfg: RunConfig, group: Group) -> Checks:
    checks = Checks()
    pairs = [(1, 1), (-1, 1), (1, 2), (2, 1), (2, 3), (3, 2), (-2, 3), (2, 2)]
    lams = [Fraction(x) for x in (-2, -1, 0, 1, 2)]
    swap = scale = True
    for (m, n), lam, k in itertools.product(pairs, lams, (1, 2, 5)):
        v = bs_sigma_classify(m, n, lam, k).verdict
        swap &= v == bs_sigma_classify(n, m, -lam, k).verdict
        scale &= v == bs_sigma_classify(m, n, 3 * lam, k).verdict
        scale &= v == bs_sigma_classify(m, n, lam, k, theory="HOMOLOGICAL").verdict
    checks.add("bs_swap_symmetry", swap)
    checks.add("bs_scale_and_theory_invariance", scale)
    rng = random.Random(cfg.seed)
    unknown = 0
    for _ in range(cfg.samples):
        c = [rng.randint(-1, 2) for _ in range(4)]
        k = rng.choice([1, 2, 3, 4, "inf"])
        unknown += schesler_classify(3, (2, 5), c, k).verdict is Verdict.UNKNOWN
    checks.add("tri_complete_case_no_unknown", unknown == 0)
    tags = all(bs_sigma_classify(2, 3, 1, 1).clause in CITATIONS for _ in range(1))
    checks.add("citations_resolve", tags)
    return checks


def verify_vr(cfg: RunConfig, group: Group) -> Checks:
    rng = random.Random(cfg.seed)
    checks = Checks()
    Z = IntegerLine()
    agree, invariant = True, True
    for _ in range(20):
        pts = rng.sample(range(-30, 31), rng.randint(1, 40))
        base = word_metric_window(Z, 30, pts)
        chi = Character(Z, (rng.choice((0, 1, -1)),))
        scales = sorted(rng.sample(range(1, 8), 3))
        rep = vr_h0_probe(base, chi, scales)
        invariant &= zero_skeleton_invariance([VRWindow(base, r, chi) for r in scales])
        for (r, h0, _), comps in zip(rep.scales, rep.components):
            agree &= h0 == max(comps - 1, 0)
    checks.add("h0_equals_pi0", agree)
    checks.add("zero_skeleton_invariance", invariant)
    for G in (Z, BaumslagSolitar(2, 1)):
        for r in (1, 2):
            rep = cofinality_check(word_metric_window(G, 4), word_lengths(G, r))
            checks.add(f"cofinality_{G}_ball{r}", rep.ok and rep.forward_scale == r, report=rep.to_json())
    return checks


SUITES: dict[str, Callable[[RunConfig, Group], Checks]] = {
    "arith": verify_arith, "groups": verify_groups, "hecke": verify_hecke,
    "chains": verify_chains, "sigma": verify_sigma, "vr": verify_vr,
}


# -- probes ---------------------------------------------------------------------------

def _stage_report(stages: list[TranslateFamily], cfg: RunConfig) -> dict:
    ring = RingSpec.parse(cfg.ring)
    return {
        "stage_parts": [len(s) for s in stages],
        "stage_vertices": [len(s.vertices) for s in stages],
        "components": [pi0(s).count for s in stages],
        "homology": [essential_acyclicity_probe(stages, k, ring).to_json() for k in range(cfg.degree + 1)],
    }


def probe(pipeline: str, cfg: RunConfig, group: Group) -> tuple[dict, Checks]:
    checks = Checks()
    chi = default_character(group, cfg.char)
    if pipeline == "group-filtration":
        stages = build_group_filtration(group, chi, cfg.W, cfg.radii)
        return _stage_report(stages, cfg), checks
    if pipeline == "coset-filtration":
        stages = build_coset_filtration(hecke_pair(group), chi, cfg.W, cfg.radii)
        return _stage_report(stages, cfg), checks
    if pipeline == "roundtrip":
        rep = phi_psi_roundtrip(hecke_pair(group), chi, cfg.W, min(cfg.radii[-1], 2) if cfg.radii else 2,
                                cfg.coset_radius, cfg.lambda_radius, cfg.samples, cfg.seed)
        checks.add("phi_psi_identity", rep.phi_psi_identity)
        checks.add("psi_phi_homotopy", rep.psi_phi_contained and rep.homotopy_ok)
        return rep.to_json(group.token), checks
    if pipeline == "vr":
        base = word_metric_window(group, cfg.W)
        rep = vr_h0_probe(base, chi, cfg.scales, RingSpec.parse(cfg.ring))
        windows = [VRWindow(base, r, chi) for r in cfg.scales]
        checks.add("zero_skeleton_invariance", zero_skeleton_invariance(windows))
        out = rep.to_json()
        out["window_points"] = len(base.points)
        return out, checks
    raise UsageError(f"unknown pipeline {pipeline!r}")


# -- argument parsing --------------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seed", type=int)
    p.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
    p.add_argument("--group")
    p.add_argument("--char", help="character coefficients, comma separated")
    p.add_argument("-W", type=int, dest="W", help="element ball radius of the translates")
    p.add_argument("--radius", type=int)
    p.add_argument("--coset-radius", type=int, dest="coset_radius")
    p.add_argument("--radii", help="part radii, e.g. 0..2 or 0,1,3")
    p.add_argument("--scales", help="VR scales, e.g. 1..4")
    p.add_argument("--degree", type=int)
    p.add_argument("--ring")
    p.add_argument("--samples", type=int)
    p.add_argument("--orbit-cap", type=int, dest="orbit_cap")
    p.add_argument("--lambda-radius", type=int, dest="lambda_radius")
    p.add_argument("--max-vertices", type=int, dest="max_vertices")


CONFIG_KEYS = ("seed", "group", "char", "W", "radius", "coset_radius", "radii", "scales", "degree",
               "ring", "samples", "orbit_cap", "lambda_radius", "max_vertices")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sigma-hecke", description="Sigma-set and Hecke pair toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    bs = sub.add_parser("bs", help="Baumslag-Solitar completions")
    bs_sub = bs.add_subparsers(dest="action", required=True)
    p = bs_sub.add_parser("classify", help="closed-form Sigma-set membership of lambda*tau")
    p.add_argument("-m", type=int, required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("-k", required=True, help="degree (integer >= 0 or inf)")
    p.add_argument("--target", default="COMPLETION", type=str.upper, choices=["COMPLETION", "DISCRETE"])
    p.add_argument("--theory", default="HOMOTOPICAL", type=str.upper, choices=["HOMOTOPICAL", "HOMOLOGICAL"])
    _common(p)

    tri = sub.add_parser("tri", help="upper triangular groups over Z[1/P]")
    tri_sub = tri.add_subparsers(dest="action", required=True)
    p = tri_sub.add_parser("classify", help="closed-form Sigma-set membership")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--primes", required=True, help="comma-separated primes")
    p.add_argument("--coords", required=True, help="coefficients over the basis chi_(k,p), k-major")
    p.add_argument("-k", required=True)
    p.add_argument("--target", default="COMPLETION", type=str.upper, choices=["COMPLETION", "DISCRETE"])
    _common(p)

    p = sub.add_parser("verify", help="run a property suite")
    p.add_argument("suite", choices=sorted(SUITES))
    _common(p)

    p = sub.add_parser("probe", help="run an evidence pipeline")
    p.add_argument("pipeline", choices=["group-filtration", "coset-filtration", "roundtrip", "vr"])
    _common(p)
    return parser


def _emit(report: dict, stream) -> None:
    stream.write(json.dumps(report, sort_keys=True, indent=2) + "\n")


def run(argv: list[str] | None = None, stream=None) -> int:
    stream = stream or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    report: dict = {"schema": "sigma-hecke/report", "schema_version": SCHEMA_VERSION, "version": __version__}
    try:
        file_values = load_config_file(args.config) if args.config else {}
        cfg = resolve_config(file_values, {k: getattr(args, k, None) for k in CONFIG_KEYS})
        report["config"] = cfg.to_json()
        report["seed"] = cfg.seed
        checks = Checks()
        if args.command == "bs":
            report["command"] = "bs classify"
            v = bs_sigma_classify(args.m, args.n, args.lam, args.k, args.target, args.theory, cfg.ring)
            report["verdicts"] = [v.to_json()]
        elif args.command == "tri":
            report["command"] = "tri classify"
            primes = [int(x) for x in args.primes.split(",")]
            coords = [x for x in args.coords.split(",") if x.strip()]
            v = schesler_classify(args.n, primes, coords, args.k, args.target)
            report["verdicts"] = [v.to_json()]
        else:
            group = parse_group(cfg.group)
            if args.command == "verify":
                report["command"] = f"verify {args.suite}"
                checks = SUITES[args.suite](cfg, group)
            else:
                report["command"] = f"probe {args.pipeline}"
                evidence, checks = probe(args.pipeline, cfg, group)
                report["evidence"] = evidence
            report["checks"] = checks.items
        report["ok"] = checks.ok
        code = 0 if checks.ok else 1
    except ContractViolation as exc:
        report.update(ok=False, error={"type": type(exc).__name__, "message": str(exc)})
        code = 1
    except (SigmaHeckeError, UsageError, ValueError, OSError) as exc:
        report.update(ok=False, error={"type": type(exc).__name__, "message": str(exc)})
        code = 2
    except Exception as exc:  # unexpected: report it as an internal failure
        report.update(ok=False, error={"type": type(exc).__name__, "message": str(exc)})
        code = 1
    if args.timing:
        report["timing"] = {"seconds": round(time.perf_counter() - started, 6)}
    report["exit_code"] = code
    _emit(report, stream)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
