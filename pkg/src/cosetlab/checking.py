"""Reference solvers, fault-injection wrappers, and the two program checkers.

The brute-force solvers work straight from the problem definitions by full
enumeration and serve as the independent oracles everything else is tested
against.  The checkers certify a program's answer on one input: the decision
checker re-derives a witness through the search reduction, the search checker
replays the program on translated self-instances; both query the program
under check nonadaptively within a run and drive per-trial randomness from a
splittable seed.
"""

from __future__ import annotations

import hashlib
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from .groups import (DEFAULT_CAP, GroupElement, WreathElement, close_under_op,
                     element_key, group_op, invert, reduce_generators,
                     wreath_unembed)
from .instances import (GhshInstance, HiddenCosetInstance, HspInstance,
                        OracleFunction, OrbitCosetInstance, Side)
from .perms import Permutation, build_stabilizer_chain, random_element
from .reductions import (InvalidKGeneratorsError, StructuredHspInstance,
                         embed_wreath_instance, hidden_coset_to_hsp,
                         recover_coset_solution)
from .search_decision import (DecisionAnswer, DecisionOracle,
                              DihedralDecisionOracle, DihedralSubgroupQuery,
                              HspSearchPlan, OracleInconsistentError, QueryRecord,
                              ShiftDecisionOracle, ShiftQuery,
                              build_hsp_search_plan, event_stamp,
                              finish_hsp_search, hsp_search_via_decision)


def trial_rng(master_seed: int, index: int) -> random.Random:
    """Independent per-trial stream derived stably from (seed, trial index)."""
    digest = hashlib.sha256(f"{master_seed}:{index}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


# -- brute-force reference solvers ---------------------------------------------------


def brute_hsp_solve(inst: HspInstance, cap: int = DEFAULT_CAP) -> list[GroupElement]:
    """Generators of {g : f(g) = f(id)}, reduced greedily; empty list when trivial."""
    return reduce_generators(inst.kernel(cap), inst.group.identity, cap)


def brute_coset_solve(inst: HiddenCosetInstance, cap: int = DEFAULT_CAP
                      ) -> tuple[list[GroupElement], GroupElement]:
    """The full shift coset, as (subgroup generators, least shift)."""
    shifts = inst.brute_shift_set(cap)
    if not shifts:
        raise ValueError("no shift relates the two functions; promise violated")
    least = min(shifts, key=element_key)
    least_inv = invert(least)
    members = [group_op(v, least_inv) for v in shifts]
    return reduce_generators(members, inst.group.identity, cap), least


def brute_ghsh_solve(inst: GhshInstance, cap: int = DEFAULT_CAP) -> GroupElement:
    shifts = inst.brute_shift_set(cap)
    if len(shifts) != 1:
        raise ValueError(f"expected a unique shift, found {len(shifts)}")
    return shifts[0]


def brute_orbit_solve(inst: OrbitCosetInstance, cap: int = DEFAULT_CAP
                      ) -> tuple[GroupElement | None, list[GroupElement]]:
    """A mapping element (None when orbits are disjoint) plus stabilizer generators."""
    act = inst.action
    stab = act.stabilizer_generators(inst.phi1)
    mapping = [g for g in act.group.elements(cap)
               if act.act(g, inst.phi1) == inst.phi0]
    if not mapping:
        return None, stab
    return min(mapping, key=element_key), stab


def brute_decide(structured: StructuredHspInstance,
                 cap: int = DEFAULT_CAP) -> DecisionAnswer:
    """Nontrivial iff some non-identity element shares the identity label and
    lies in every constraint group."""
    identity_key = element_key(structured.base.group.identity)
    for g in structured.base.kernel(cap):
        if element_key(g) == identity_key:
            continue
        if all(c.contains(g) for c in structured.constraints):
            return DecisionAnswer.NONTRIVIAL
    return DecisionAnswer.TRIVIAL


class BruteForceDecisionOracle(DecisionOracle):
    """Answers structured decision queries by enumerate-and-filter."""

    def __init__(self, cap: int = DEFAULT_CAP):
        super().__init__()
        self.cap = cap

    def _answer(self, query: QueryRecord) -> DecisionAnswer:
        return brute_decide(query.instance, self.cap)


class BruteForceShiftOracle(ShiftDecisionOracle):
    """Answers shift-existence queries by trying every subgroup element."""

    def __init__(self, cap: int = DEFAULT_CAP):
        super().__init__()
        self.cap = cap

    def _answer(self, query: ShiftQuery) -> bool:
        elems = query.group.elements(self.cap)
        tagged = [(g, query.f1(g)) for g in elems]
        return any(all(lab == query.f2(group_op(g, w)) for g, lab in tagged)
                   for w in elems)


class BruteForceDihedralOracle(DihedralDecisionOracle):
    """Scans the query subgroup for a non-identity element with the identity label."""

    def __init__(self, cap: int = DEFAULT_CAP):
        super().__init__()
        self.cap = cap

    def _answer(self, query: DihedralSubgroupQuery) -> DecisionAnswer:
        f = query.instance.oracle
        base = f.evaluate(query.instance.group.identity)
        for g in query.subgroup().elements(self.cap):
            if not g.is_identity() and f.evaluate(g) == base:
                return DecisionAnswer.NONTRIVIAL
        return DecisionAnswer.TRIVIAL


# -- programs under check and fault injection ----------------------------------------


class SearchProgram:
    """A hidden-subgroup search program: instance -> (generators, optional shift)."""

    def __init__(self):
        self.call_log: list[int] = []

    def run(self, inst: HspInstance) -> tuple[list[GroupElement], GroupElement | None]:
        self.call_log.append(event_stamp())
        return self._run(inst)

    def _run(self, inst: HspInstance):
        raise NotImplementedError

    @property
    def calls(self) -> int:
        return len(self.call_log)


class BruteSearchProgram(SearchProgram):
    def __init__(self, cap: int = DEFAULT_CAP):
        super().__init__()
        self.cap = cap

    def _run(self, inst: HspInstance):
        return brute_hsp_solve(inst, self.cap), None


@dataclass
class BugSpec:
    """How a wrapped program's answers deviate.

    Modes: ``always_trivial``, ``always_nontrivial``, ``flip_with_prob``
    (probability ``flip_probability``, own seeded stream), and
    ``wrong_on_matching`` (answers flipped or mutated exactly where
    ``predicate`` matches the queried instance).  ``mutate`` applies to
    search programs and rewrites the (generators, shift) answer; the default
    drops the last generator.
    """

    mode: str
    flip_probability: float = 0.0
    predicate: Callable | None = None
    seed: int = 0
    mutate: Callable | None = None

    MODES = ("always_trivial", "always_nontrivial", "flip_with_prob",
             "wrong_on_matching")

    def __post_init__(self):
        if self.mode not in self.MODES:
            raise ValueError(f"unknown bug mode {self.mode!r}")
        if self.mode == "wrong_on_matching" and self.predicate is None:
            raise ValueError("wrong_on_matching needs a predicate")


def _flip(answer: DecisionAnswer) -> DecisionAnswer:
    return (DecisionAnswer.TRIVIAL if answer is DecisionAnswer.NONTRIVIAL
            else DecisionAnswer.NONTRIVIAL)


class BuggyDecisionOracle(DecisionOracle):
    def __init__(self, inner: DecisionOracle, spec: BugSpec):
        super().__init__()
        self.inner = inner
        self.spec = spec
        self._rng = random.Random(spec.seed)

    def _answer(self, query: QueryRecord) -> DecisionAnswer:
        spec = self.spec
        if spec.mode == "always_trivial":
            return DecisionAnswer.TRIVIAL
        if spec.mode == "always_nontrivial":
            return DecisionAnswer.NONTRIVIAL
        honest = self.inner.answer(query)
        if spec.mode == "flip_with_prob":
            return _flip(honest) if self._rng.random() < spec.flip_probability else honest
        if spec.predicate(query.instance):
            return _flip(honest)
        return honest


class BuggyShiftOracle(ShiftDecisionOracle):
    def __init__(self, inner: ShiftDecisionOracle, spec: BugSpec):
        super().__init__()
        self.inner = inner
        self.spec = spec
        self._rng = random.Random(spec.seed)

    def _answer(self, query: ShiftQuery) -> bool:
        spec = self.spec
        if spec.mode == "always_trivial":
            return False
        if spec.mode == "always_nontrivial":
            return True
        honest = self.inner.answer(query)
        if spec.mode == "flip_with_prob":
            return (not honest) if self._rng.random() < spec.flip_probability else honest
        return (not honest) if spec.predicate(query) else honest


class BuggyDihedralOracle(DihedralDecisionOracle):
    def __init__(self, inner: DihedralDecisionOracle, spec: BugSpec):
        super().__init__()
        self.inner = inner
        self.spec = spec
        self._rng = random.Random(spec.seed)

    def _answer(self, query: DihedralSubgroupQuery) -> DecisionAnswer:
        spec = self.spec
        if spec.mode == "always_trivial":
            return DecisionAnswer.TRIVIAL
        if spec.mode == "always_nontrivial":
            return DecisionAnswer.NONTRIVIAL
        honest = self.inner.answer(query)
        if spec.mode == "flip_with_prob":
            return _flip(honest) if self._rng.random() < spec.flip_probability else honest
        return _flip(honest) if spec.predicate(query) else honest


def _drop_last_generator(result):
    gens, rep = result
    return gens[:-1], rep


class BuggySearchProgram(SearchProgram):
    def __init__(self, inner: SearchProgram, spec: BugSpec):
        super().__init__()
        self.inner = inner
        self.spec = spec
        self._rng = random.Random(spec.seed)

    def _run(self, inst: HspInstance):
        spec = self.spec
        if spec.mode == "always_trivial":
            return [], None
        honest = self.inner.run(inst)
        mutate = spec.mutate or _drop_last_generator
        if spec.mode == "always_nontrivial":
            if honest[0]:
                return honest
            fake = [g for g in inst.group.generators if not g.is_identity()]
            return fake[:1], None
        if spec.mode == "flip_with_prob":
            return mutate(honest) if self._rng.random() < spec.flip_probability else honest
        if spec.predicate(inst):
            return mutate(honest)
        return honest


def wrap_buggy(program, spec: BugSpec):
    """Wrap a program or oracle so its answers deviate exactly as described."""
    if isinstance(program, DecisionOracle):
        return BuggyDecisionOracle(program, spec)
    if isinstance(program, SearchProgram):
        return BuggySearchProgram(program, spec)
    if isinstance(program, ShiftDecisionOracle):
        return BuggyShiftOracle(program, spec)
    if isinstance(program, DihedralDecisionOracle):
        return BuggyDihedralOracle(program, spec)
    raise TypeError(f"cannot wrap {type(program).__name__}")


# -- checkers --------------------------------------------------------------------------


@dataclass(frozen=True)
class TrialRecord:
    index: object
    description: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class CheckerVerdict:
    """CORRECT or BUGGY, derived purely from the transcript of sub-results."""

    verdict: str
    transcript: tuple[TrialRecord, ...]
    checker_steps: int
    oracle_calls: int
    construction_done_stamp: int | None = None
    first_trial_call_stamp: int | None = None


def _verdict(transcript: Sequence[TrialRecord], oracle_calls: int,
             construction_done=None, first_trial_call=None) -> CheckerVerdict:
    ok = all(t.ok for t in transcript)
    return CheckerVerdict("CORRECT" if ok else "BUGGY", tuple(transcript),
                          checker_steps=len(transcript), oracle_calls=oracle_calls,
                          construction_done_stamp=construction_done,
                          first_trial_call_stamp=first_trial_call)


def _translated_instance(inst: HspInstance, rng: random.Random,
                         chain) -> tuple[GroupElement, HspInstance]:
    """One self-trial: translate f by a random u, pair the functions, flatten."""
    u = random_element(chain, rng)
    u_inv = invert(u)
    f = inst.oracle
    f2 = OracleFunction(lambda g: f.evaluate(group_op(g, u_inv)),
                        description="translated labels")
    paired = hidden_coset_to_hsp(HiddenCosetInstance(inst.group, f, f2))
    return u, embed_wreath_instance(paired)


def _require_left_permutation_instance(inst: HspInstance) -> int:
    identity = inst.group.identity
    if not isinstance(identity, Permutation):
        raise TypeError("checkers run over permutation groups")
    if inst.side is not Side.LEFT:
        raise ValueError("checkers need label-distinct left cosets; plant with the left side")
    return identity.degree


def checker_hspD(program: DecisionOracle, inst: HspInstance, k: int,
                 seed: int = 0, cap: int = DEFAULT_CAP, jobs: int = 1) -> CheckerVerdict:
    """Certify a decision program's answer on one instance.

    A NONTRIVIAL answer is checked by running the search reduction with the
    program as its oracle and testing the witness.  A TRIVIAL answer is
    checked by k independent trials: translate the function by a random u,
    pair the functions over the doubled points, and demand the program-driven
    search return exactly the slot-swapping element built from u.  All trial
    query batches are constructed before the program is consulted again.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    n = _require_left_permutation_instance(inst)
    chain = build_stabilizer_chain(inst.group.generators, n)
    calls_before = program.calls
    transcript: list[TrialRecord] = []

    first = program.answer(QueryRecord(("whole-input",),
                                       StructuredHspInstance(inst, ())))
    if first is DecisionAnswer.NONTRIVIAL:
        try:
            found = hsp_search_via_decision(inst, program, cap, jobs=jobs)
        except OracleInconsistentError as exc:
            transcript.append(TrialRecord("search", "witness search", False, str(exc)))
            return _verdict(transcript, program.calls - calls_before)
        if found is None:
            transcript.append(TrialRecord("search", "witness search", False,
                                          "no witness found"))
        else:
            ok = (not found.is_identity()
                  and inst.oracle.evaluate(found) == inst.oracle.evaluate(inst.group.identity))
            transcript.append(TrialRecord("search", "witness search", ok,
                                          f"witness {found}"))
        return _verdict(transcript, program.calls - calls_before)

    plans: list[tuple[int, GroupElement, HspSearchPlan]] = []
    for t in range(k):
        u, flat = _translated_instance(inst, trial_rng(seed, t), chain)
        plans.append((t, u, build_hsp_search_plan(flat, cap)))
    construction_done = event_stamp()
    first_call_index = program.calls

    def run_trial(item):
        t, u, plan = item
        expected = WreathElement((invert(u), u), 1)
        try:
            answers = plan.batch.run(program, jobs=1)
            found = finish_hsp_search(plan, answers)
        except OracleInconsistentError as exc:
            return TrialRecord(t, "translate trial", False, str(exc))
        if found is None:
            return TrialRecord(t, "translate trial", False, "no hidden element found")
        got = wreath_unembed(found, n)
        if got != expected:
            return TrialRecord(t, "translate trial", False,
                               f"recovered {got}, expected the planted swap")
        return TrialRecord(t, "translate trial", True)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            transcript.extend(pool.map(run_trial, plans))
    else:
        transcript.extend(run_trial(item) for item in plans)

    first_trial_call = (program.call_log[first_call_index].stamp
                        if program.calls > first_call_index else None)
    return _verdict(transcript, program.calls - calls_before,
                    construction_done, first_trial_call)


def checker_hsp(program: SearchProgram, inst: HspInstance, k: int,
                seed: int = 0, cap: int = DEFAULT_CAP, jobs: int = 1) -> CheckerVerdict:
    """Certify a search program's output on one instance.

    The claimed generators must share the identity's label; then k translate
    trials re-run the program on the paired instance and require it to name
    the same subgroup and a shift in the same right coset as the planted u.
    Trial instances are all constructed before the program sees any of them.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    n = _require_left_permutation_instance(inst)
    chain = build_stabilizer_chain(inst.group.generators, n)
    calls_before = program.calls
    transcript: list[TrialRecord] = []

    claimed, _ = program.run(inst)
    base_label = inst.oracle.evaluate(inst.group.identity)
    members_ok = True
    detail = ""
    for s in claimed:
        try:
            if inst.oracle.evaluate(s) != base_label:
                members_ok = False
                detail = f"{s} is not in the hidden subgroup"
                break
        except Exception as exc:
            members_ok = False
            detail = f"claimed generator {s} rejected: {exc}"
            break
    transcript.append(TrialRecord("members", "claimed generators lie in the subgroup",
                                  members_ok, detail))
    claimed_closure = {element_key(g)
                       for g in close_under_op(claimed, inst.group.identity, cap)}

    trials = []
    for t in range(k):
        rng = trial_rng(seed, t)
        u = random_element(chain, rng)
        u_inv = invert(u)
        f = inst.oracle
        f2 = OracleFunction(lambda g, ui=u_inv: f.evaluate(group_op(g, ui)),
                            description="translated labels")
        paired = hidden_coset_to_hsp(HiddenCosetInstance(inst.group, f, f2))
        trials.append((t, u, embed_wreath_instance(paired)))
    construction_done = event_stamp()
    first_call_index = program.calls

    def run_trial(item):
        t, u, flat = item
        claimed_emb, _ = program.run(flat)
        try:
            k_gens = [wreath_unembed(p, n) for p in claimed_emb]
            sub_gens, u_prime = recover_coset_solution(k_gens, inst.group)
        except (InvalidKGeneratorsError, ValueError) as exc:
            return TrialRecord(t, "translate trial", False, str(exc))
        recovered = {element_key(g)
                     for g in close_under_op(sub_gens, inst.group.identity, cap)}
        if recovered != claimed_closure:
            return TrialRecord(t, "translate trial", False,
                               "recovered subgroup differs from the claimed one")
        if element_key(group_op(u_prime, invert(u))) not in claimed_closure:
            return TrialRecord(t, "translate trial", False,
                               "recovered shift lies outside the claimed coset")
        return TrialRecord(t, "translate trial", True)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            transcript.extend(pool.map(run_trial, trials))
    else:
        transcript.extend(run_trial(item) for item in trials)

    first_trial_call = (program.call_log[first_call_index]
                        if program.calls > first_call_index else None)
    return _verdict(transcript, program.calls - calls_before,
                    construction_done, first_trial_call)
