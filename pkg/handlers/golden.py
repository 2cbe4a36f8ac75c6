"""
Golden suite: replays the worked Z/12 (Gamma = {1, 5}) and Z/4 results and
prints pass or fail for each claim.
"""

import logging
from typing import Callable, Dict, List, Tuple

from handlers import CommandResult, guarded, verdict_code
from handlers.verify import slice_rows
from utils import GammaSpecError
from utils.cohomology import cech_complex, cohomology, is_acyclic
from utils.config import RunConfig
from utils.dot import covering_pairs
from utils.homological import flatness_probe, tor1_cyclic
from utils.ideals import basic_open, ideal_closure, is_discrete, is_prime, is_t0, replay_prime_witness, spectrum
from utils.modules import build_modular_module, module_from_semiring
from utils.reports import render_report
from utils.semiring import TernarySemiring, build_modular

logger = logging.getLogger(__name__)

SLICE_ROWS = (0, 1, 2, 3, 4, 6)
# rows a of {a 1 b}_1 over b = 0..11, as printed
PRINTED_SLICE = [
    (0, [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]),
    (1, [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11]),
    (2, [0, 2, 4, 6, 8, 10, 0, 2, 4, 6, 8, 10]),
    (3, [0, 3, 6, 9, 0, 3, 6, 9, 0, 3, 6, 9]),
    (4, [0, 4, 8, 0, 4, 8, 0, 4, 8, 0, 4, 8]),
    (6, [0, 6, 0, 6, 0, 6, 0, 6, 0, 6, 0, 6]),
]
EXPECTED_IDEALS = [(0,), (0, 6), (0, 4, 8), (0, 3, 6, 9), (0, 2, 4, 6, 8, 10), tuple(range(12))]
EXPECTED_PRIMES = [(0, 3, 6, 9), (0, 2, 4, 6, 8, 10)]
# (ideal generator, witness (a, b, c, gamma index)) as printed for the non-primes
NON_PRIME_WITNESSES = [(0, (2, 2, 3, 0)), (6, (2, 3, 1, 0)), (4, (2, 2, 1, 0))]
EXPECTED_COVERS = {((0,), (0, 6)), ((0,), (0, 4, 8)), ((0, 4, 8), (0, 2, 4, 6, 8, 10)),
                   ((0, 6), (0, 2, 4, 6, 8, 10)), ((0, 6), (0, 3, 6, 9))}

Claim = Tuple[str, Callable[[], Tuple[bool, str]]]


def z12_claims(T: TernarySemiring, config: RunConfig) -> List[Claim]:
    S = spectrum(T, config)

    def slice_table():
        got = slice_rows(T, T.gamma_names.index("1"), 1, SLICE_ROWS)
        return got == PRINTED_SLICE, f"{len(got)} rows"

    def ideals():
        got = [I.members for I in S.ideals]
        return got == EXPECTED_IDEALS, str(got)

    def non_primes():
        details = []
        ok = True
        for g, witness in NON_PRIME_WITNESSES:
            I = ideal_closure(T, (g,))
            ok &= not is_prime(T, I) and replay_prime_witness(T, I, witness)
            details.append(f"{I.label()}:{witness}")
        return ok, ", ".join(details)

    def primes():
        got = [P.members for P in S.primes]
        return got == EXPECTED_PRIMES, str(got)

    def topology():
        closed = sorted(sorted(C) for C in S.closed_sets)
        ok = closed == [[], [0], [0, 1], [1]] and is_t0(S) and is_discrete(S)
        return ok, f"closed sets {closed}"

    def basic_opens():
        p2 = S.primes.index(ideal_closure(T, (2,)))
        p3 = S.primes.index(ideal_closure(T, (3,)))
        return basic_open(S, 3) == {p2} and basic_open(S, 2) == {p3}, "D(3) = {P2}, D(2) = {P3}"

    def inclusion_lattice():
        proper = [I for I in S.ideals if I.is_proper]
        got = {(proper[i].members, proper[j].members) for i, j in covering_pairs(proper)}
        return got == EXPECTED_COVERS, f"{len(got)} covering pairs"

    def acyclic():
        C = cech_complex(T, [2, 3], module_from_semiring(T), config, S)
        H = cohomology(C)
        return is_acyclic(H) and C.group_complete, str([h["order"] for h in H])

    return [
        ("slice_table", slice_table),
        ("ideal_classification", ideals),
        ("non_prime_witnesses", non_primes),
        ("spectrum", primes),
        ("discrete_t0_topology", topology),
        ("basic_opens", basic_opens),
        ("inclusion_lattice", inclusion_lattice),
        ("affine_acyclicity", acyclic),
    ]


def z4_claims(config: RunConfig) -> List[Claim]:
    T4 = build_modular(4, [1], config)
    M2 = build_modular_module(T4, 2)

    def action_vanishes():
        return bool((M2.action_tables[:, 2, :, 1] == 0).all()), "{2 x 1} = 0 on Z/2"

    def tor_nonzero():
        got = tor1_cyclic(T4, 2, M2, config).invariant_factors
        return got == [2], str(got)

    def tor_free():
        got = tor1_cyclic(T4, 4, M2, config).invariant_factors
        return got == [], str(got)

    def not_flat():
        report = flatness_probe(T4, M2, config)
        return not report.flat and report.witness == 2, f"witness {report.witness}"

    return [
        ("quotient_action_vanishes", action_vanishes),
        ("tor1_z2_z2", tor_nonzero),
        ("tor1_free_vanishes", tor_free),
        ("z2_not_flat", not_flat),
    ]


def run_claims(claims: List[Claim]) -> List[Dict]:
    results = []
    for name, check in claims:
        try:
            passed, detail = check()
        except GammaSpecError as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        if not passed:
            logger.warning(f"Claim {name} failed: {detail}")
        results.append({"name": name, "passed": bool(passed), "detail": detail})
    return results


@guarded
def cmd_paper_check(config: RunConfig, T: TernarySemiring) -> CommandResult:
    """Exposed as the golden-check subcommand."""
    if T.modulus != 12:
        logger.warning(f"Golden claims describe Z/12; input is {T.describe()}")
    claims = run_claims(z12_claims(T, config) + z4_claims(config))
    passed = all(c["passed"] for c in claims)
    logger.info(f"{sum(c['passed'] for c in claims)}/{len(claims)} claims pass")
    document = {"semiring": T.describe(), "claims": claims, "passed": passed}
    return CommandResult(verdict_code(passed), render_report("golden", document))
