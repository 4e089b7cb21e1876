"""Main application orchestrator.

This module wires the services together and turns a scenario into a report
for each CLI command.
"""

import copy
import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import Any, TypeVar

from pyshifts.config import Scenario, VerificationConfig, build_default_config
from pyshifts.domain import (
    Branch,
    ClassicalWeights,
    Inconclusive,
    Line,
    LinearOp,
    MissingWeightError,
    NotApplicableError,
    NotChainRecurrent,
    OpFamily,
    ProductSeminorms,
    Report,
    ScalarMode,
    ScenarioError,
    SeqVector,
    TruncationParams,
    VertexId,
    ZeroWeightError,
    seminorm_family,
)
from pyshifts.domain.scalars import Real, to_scalar
from pyshifts.repositories import IReportRepository, IScenarioRepository
from pyshifts.services import (
    CertificateService,
    ChainSearchService,
    ChainService,
    ConstructionService,
    CriterionService,
    OperatorService,
    TreeBuilderService,
)
from pyshifts.services.construction_service import lift_window, merge_windows

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

COMMANDS = ("verify-constructions", "certify", "classify", "oracle")


def oracle_window(
    family: OpFamily, vertices: Iterable[VertexId], horizon: int, first_index: int | None = None
) -> TruncationParams:
    """Window in which chains of length ``horizon`` around ``vertices`` never leak.

    Line mass drifts left and branch mass drifts down by one vertex per step,
    and influence paths climb the same distance, so ``horizon + 1`` vertices
    of margin on every side suffice.
    """
    vertices = list(vertices)
    ns = [v.n for v in vertices if isinstance(v, Line)]
    ns += [-v.k for v in vertices if isinstance(v, Branch)]
    ks = [v.k for v in vertices if isinstance(v, Branch)]
    js = [v.j for v in vertices if isinstance(v, Branch)]
    n_min = min([0, *ns]) - horizon - 1
    n_max = max([1, *ns]) + horizon + 1
    if family is OpFamily.CLASSICAL_SHIFT:
        if first_index is not None:
            n_min = first_index
        return TruncationParams(n_min, n_max)
    k_max = max(ks, default=1)
    if family is OpFamily.COMB_SHIFT:
        return lift_window(TruncationParams(n_min, n_max, k_max), family)
    j_min = min([-1, *js]) - horizon - 1
    j_max = max([1, *js]) + horizon + 1
    return lift_window(TruncationParams(n_min, n_max, k_max, j_min, j_max), family)


class VerificationRunner:
    """Main application orchestrator with dependency injection.

    Each ``run_*`` method takes a validated scenario and returns a
    :class:`Report`; independent entries run on a thread pool of
    ``config.jobs`` workers while report assembly keeps their order.
    """

    def __init__(
        self,
        config: VerificationConfig | None = None,
        scenario_repo: IScenarioRepository | None = None,
        report_repo: IReportRepository | None = None,
    ):
        """Initialize runner with configuration.

        Args:
            config: Tolerances, budgets and worker count
            scenario_repo: Where scenarios are loaded from
            report_repo: Where reports are saved
        """
        self.config = config or build_default_config()

        # Initialize repositories
        self.scenario_repo = scenario_repo
        self.report_repo = report_repo

        # Initialize services
        self.tree_builder = TreeBuilderService()
        self.operator_service = OperatorService(self.config, self.tree_builder)
        self.chain_service = ChainService(self.operator_service, self.config)
        self.construction_service = ConstructionService(
            self.operator_service, self.chain_service, self.config
        )
        self.certificate_service = CertificateService(self.operator_service, self.config)
        self.criterion_service = CriterionService(
            self.operator_service, self.certificate_service, self.config
        )
        self.search_service = ChainSearchService(self.config)

    # ------------------------------------------------------------------
    # Entry points
    # ------------------------------------------------------------------

    def run(self, command: str, scenario: Scenario) -> Report:
        """Dispatch ``command`` to its ``run_*`` method."""
        handlers: dict[str, Callable[[Scenario], Report]] = {
            "verify-constructions": self.run_verify_constructions,
            "certify": self.run_certify,
            "classify": self.run_classify,
        }
        if command not in handlers:
            raise ValueError(f"Unknown command {command!r}, expected one of {sorted(handlers)}")
        logger.info(f"Running {command} on scenario {scenario.name!r}")
        report = handlers[command](scenario)
        logger.info(f"{command} on {scenario.name!r}: {report.status}")
        return report

    def run_file(self, command: str, name: str, out: str | None = None) -> Report:
        """Load a scenario from the scenario repository, run it and save the report."""
        if self.scenario_repo is None:
            raise ScenarioError("No scenario repository configured", field="scenario")
        report = self.run(command, self.scenario_repo.load(name))
        if out is not None and self.report_repo is not None:
            self.report_repo.save(out, report)
        return report

    def run_verify_constructions(self, scenario: Scenario) -> Report:
        """Build and validate the membership chain of every ``(delta, e_n)`` pair.

        Raises:
            ScenarioError: For classical scenarios, which have no construction
        """
        if scenario.family == "classical":
            raise ScenarioError("Constructions need a comb or grid scenario", field="family")
        pairs = [
            (delta, n)
            for delta in scenario.deltas
            for n in range(scenario.line_range[0], scenario.line_range[1] + 1)
        ]
        if not pairs:
            logger.info("Empty tolerance grid; nothing to verify")
            return self._report("verify-constructions", scenario, [], ["empty tolerance grid"])

        op = self._line_operator(scenario, pairs)
        entries = self._map(lambda p: self._membership_entry(op, scenario, *p), pairs)
        return self._report("verify-constructions", scenario, entries)

    def run_certify(self, scenario: Scenario) -> Report:
        """Certify every branch basis vector as excluded and every line basis vector as member.

        Classical scenarios are handed to :meth:`run_classify`.
        """
        if scenario.family == "classical":
            report = self.run_classify(scenario)
            return self._report(
                "certify",
                scenario,
                list(report.entries),
                ["classical scenario certified through the series criterion", *report.notes],
                report.passed,
            )

        notes: list[str] = []
        entries: list[dict[str, Any]] = []
        weights = scenario.weights
        if scenario.family == "grid":
            self.operator_service.check_grid_conditions(weights, max(scenario.certify_k_max, 1))

        branch_vertices = self._branch_vertices(scenario)
        if branch_vertices:
            oracle_op = self.operator_service.build_for_family(
                scenario.op_family,
                weights,
                oracle_window(scenario.op_family, branch_vertices, scenario.oracle_horizon),
            )
            search_op = self.operator_service.build_for_family(
                scenario.op_family,
                weights,
                oracle_window(scenario.op_family, branch_vertices, self.config.search_max_length),
            )
            # cached rows are filled before the worker threads share the operators
            _ = oracle_op.rows, search_op.rows
            entries += self._map(
                lambda iv: self._branch_entry(scenario, oracle_op, search_op, *iv),
                list(enumerate(branch_vertices)),
            )
        else:
            notes.append("no branch vectors: line block certified as a classical shift")
            entries.append(self._line_block_entry(scenario))

        pairs = [
            (delta, n)
            for delta in scenario.deltas
            for n in range(scenario.line_range[0], scenario.line_range[1] + 1)
        ]
        if pairs:
            op = self._line_operator(scenario, pairs)
            entries += self._map(lambda p: self._membership_entry(op, scenario, *p), pairs)
        else:
            notes.append("empty tolerance grid: no line membership chains")

        entries.append(self._operator_entry(scenario))
        return self._report("certify", scenario, entries, notes)

    def run_classify(self, scenario: Scenario) -> Report:
        """Classify a classical shift with the series criterion.

        Shifts with vanishing weights get the zero-weight analysis instead.

        Raises:
            ScenarioError: For comb and grid scenarios
        """
        if scenario.family != "classical":
            raise ScenarioError("classify needs a classical scenario", field="family")
        weights = scenario.classical
        criterion = self._criterion_for(scenario)
        notes: list[str] = []
        entries: list[dict[str, Any]] = []
        passed = True
        try:
            verdict = criterion.classify_classical(weights, scenario.norm)
            entries.append({"kind": "verdict", **verdict.to_json()})
            if isinstance(verdict, NotChainRecurrent):
                oracle = verdict.derivation["oracle"]
                passed = oracle["infimum"] >= verdict.bound
                if not passed:
                    logger.error(f"Oracle value {oracle['infimum']} undercuts {verdict.bound}")
            elif isinstance(verdict, Inconclusive):
                notes.append(verdict.reason)
        except ZeroWeightError as e:
            logger.info(f"{e}; running the zero-weight analysis")
            analysis = criterion.zero_weight_analysis(weights, scenario.norm)
            entries.append({"kind": "zero_weight", **analysis.to_json()})
            notes.append("weights vanish: zero-weight analysis")
        entries += self._partial_sum_rows(scenario, weights)
        return self._report("classify", scenario, entries, notes, passed)

    def run_oracle(
        self,
        scenario: Scenario,
        source: VertexId | None,
        target: VertexId,
        value: Any,
        length: int,
        family: str | None = None,
    ) -> Report:
        """Ad-hoc reach query: least tolerance of a chain from ``e_source`` to ``value`` at target.

        Args:
            scenario: Supplies the weights, norm and scalar mode
            source: Start basis vertex, or None for the zero vector
            target: Coordinate that has to reach ``value``
            value: Required value of the target coordinate
            length: Chain length
            family: ``comb`` or ``grid`` to override the scenario family
        """
        if family is not None and family != scenario.family:
            if scenario.family == "classical" or family not in ("comb", "grid"):
                raise ScenarioError(f"Cannot query {family} with this scenario", field="family")
            op_family = OpFamily.COMB_SHIFT if family == "comb" else OpFamily.GRID_T
        else:
            op_family = scenario.op_family
        weights = scenario.classical if op_family is OpFamily.CLASSICAL_SHIFT else scenario.weights
        first = weights.first_index if isinstance(weights, ClassicalWeights) else None
        involved = [target] if source is None else [source, target]
        window = oracle_window(op_family, involved, length, first)
        op = self.operator_service.build_for_family(op_family, weights, window)
        start = SeqVector.zero(op.mode) if source is None else SeqVector.basis(source, op.mode)

        path = self.certificate_service.influence_path(op, target, length - 1)
        least = self.certificate_service.min_delta_reach(
            op, start, target, value, length, scenario.norm
        )
        entry = {
            "kind": "oracle",
            "family": op_family.value,
            "source": "0" if source is None else str(source),
            "target": str(target),
            "value": to_scalar(value, op.mode),
            "length": length,
            "min_delta": least,
            "influence_path": path,
            "window": window,
        }
        logger.info(f"Least tolerance to reach {value} at {target} in {length} steps: {least}")
        return self._report("oracle", scenario, [entry])

    # ------------------------------------------------------------------
    # Entries
    # ------------------------------------------------------------------

    def _membership_entry(
        self, op: LinearOp, scenario: Scenario, delta: Real, n: int
    ) -> dict[str, Any]:
        chain = self.construction_service.membership_witness(n, delta, op, scenario.norm)
        validation = self.chain_service.validate(chain)
        e_n = SeqVector.basis(Line(n), op.mode)
        gap = self.chain_service.endpoint_gap(chain, e_n, e_n)
        exact = gap == 0 if op.mode is ScalarMode.EXACT else gap <= self.config.junction_tolerance
        if not (validation.valid and exact):
            logger.error(f"Membership chain for e_{n} at delta={delta} failed validation")
        else:
            logger.debug(f"e_{n} at delta={delta}: length {chain.length}")
        return {
            "kind": "line",
            "vector": f"e_{n}",
            "n": n,
            "delta": delta,
            "length": chain.length,
            "defect": validation.defect,
            "margin": validation.margin,
            "valid": validation.valid,
            "endpoint_gap": gap,
            "endpoints_exact": exact,
            "recipe": chain.recipe,
            "verdict": "ChainRecurrent",
            "passed": validation.valid and exact,
        }

    def _branch_entry(
        self,
        scenario: Scenario,
        oracle_op: LinearOp,
        search_op: LinearOp,
        index: int,
        v: Branch,
    ) -> dict[str, Any]:
        f = SeqVector.basis(v, oracle_op.mode)
        if scenario.family == "comb":
            verdict = self.certificate_service.noncr_bound_comb(f, scenario.weights)
        else:
            verdict = self.certificate_service.noncr_bound_grid(f, scenario.weights)
        entry: dict[str, Any] = {
            "kind": "branch",
            "vector": f"e_{v}",
            "k": v.k,
            "j": v.j,
            "verdict": verdict,
        }
        if not isinstance(verdict, NotChainRecurrent):
            logger.warning(f"No exclusion certificate for e_{v}")
            return {**entry, "passed": False}

        infimum, m = self._oracle_for(scenario, oracle_op, f, verdict)
        consistent = infimum >= verdict.bound
        if not consistent:
            logger.error(f"Oracle value {infimum} undercuts the bound {verdict.bound} for e_{v}")
        entry.update(
            bound=verdict.bound,
            case=verdict.derivation.get("case", "comb"),
            oracle={
                "infimum": infimum,
                "argmin_m": m,
                "horizon": scenario.oracle_horizon,
                "consistent": consistent,
            },
            search=None,
        )
        found = False
        if scenario.search and not isinstance(scenario.norm, ProductSeminorms):
            result = self.search_service.search(
                search_op, f, verdict.bound, scenario.norm, seed=scenario.seed + index
            )
            entry["search"] = result
            found = result.found
            if found:
                logger.error(f"Randomized search returned to e_{v} below the certified bound")
        entry["passed"] = consistent and not found
        return entry

    def _oracle_for(
        self, scenario: Scenario, op: LinearOp, f: SeqVector, verdict: NotChainRecurrent
    ) -> tuple[Real, int]:
        d = verdict.derivation
        horizons = range(1, scenario.oracle_horizon + 1)
        cert = self.certificate_service
        if scenario.family == "comb":
            target = Branch(d["k"], d["j_k"])
            return cert.oracle_infimum(
                op, f, target, f.coordinate(target), horizons, scenario.norm
            )
        k, j0 = d["k"], d["j0"]
        if d["case"] == 1:
            target = Branch(k, j0)
            zero = SeqVector.zero(op.mode)
            return cert.oracle_infimum(
                op, zero, target, f.coordinate(target), horizons, scenario.norm
            )
        return cert.oracle_infimum(
            op, f, lambda length: Branch(k, j0 - length), 0, horizons, scenario.norm
        )

    def _line_block_entry(self, scenario: Scenario) -> dict[str, Any]:
        """Classify the line block, ``mu1`` times the unweighted bilateral shift."""
        op = self._base_operator(scenario)
        block = self.operator_service.restrict_to_line(op)
        mu1 = scenario.weights.mu1
        uniform = all(c == mu1 for column in block.columns.values() for _, c in column)
        weights = ClassicalWeights.constant("bilateral", mu1, scenario.mode)
        verdict = self._criterion_for(scenario).classify_classical(weights, scenario.norm)
        return {
            "kind": "line_block",
            "uniform_weight": uniform,
            "weight": mu1,
            "verdict": verdict,
            "passed": uniform,
        }

    def _operator_entry(self, scenario: Scenario) -> dict[str, Any]:
        op = self._base_operator(scenario)
        entry: dict[str, Any] = {
            "kind": "operator",
            "family": op.family.value,
            "window": op.tree.params,
            "missing_preimages": [str(v) for v in self.operator_service.missing_preimages(op)],
            "norm_bound": None,
            "passed": True,
        }
        if not isinstance(scenario.norm, ProductSeminorms):
            entry["norm_bound"] = self.operator_service.norm_bound(op, scenario.norm)
        if scenario.family == "comb":
            try:
                witness = self.operator_service.kernel_witness(op, Line(-1))
                entry["kernel_witness"] = witness
                entry["kernel_image_zero"] = self.operator_service.apply(op, witness).is_zero()
                entry["passed"] = entry["kernel_image_zero"]
            except NotApplicableError as e:
                logger.debug(f"No kernel witness: {e}")
                entry["kernel_witness"] = None
        else:
            inverse = self.operator_service.build_for_family(
                OpFamily.GRID_T_INVERSE, scenario.weights, op.tree.params
            )
            left = self.operator_service.identity_defects(op, inverse)
            right = self.operator_service.identity_defects(inverse, op)
            entry["inverse_defects"] = {
                "T o T^-1": [str(v) for v in left],
                "T^-1 o T": [str(v) for v in right],
            }
            entry["passed"] = not left and not right
        return entry

    def _partial_sum_rows(
        self, scenario: Scenario, weights: ClassicalWeights
    ) -> list[dict[str, Any]]:
        """Partial sums of both series at the base index, with the bound each one implies."""
        family = seminorm_family(scenario.norm)
        n0 = 1 if weights.kind == "unilateral" else 0
        rows = []
        for m in range(1, scenario.oracle_horizon + 1):
            try:
                plus, minus = self.criterion_service.criterion_partial_sums(
                    weights, family, n0, family.count, m
                )
            except (ZeroWeightError, MissingWeightError) as e:
                logger.debug(f"Partial sums stop at m={m}: {e}")
                break
            row: dict[str, Any] = {
                "kind": "partial_sums",
                "n0": n0,
                "m": m,
                "S+": plus,
                "bound_plus": 1 / (1 + plus),
            }
            if weights.kind == "bilateral":
                row["S-"] = minus
                row["bound_minus"] = 1 / minus if minus else None
            rows.append(row)
        return rows

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    def _branch_vertices(self, scenario: Scenario) -> list[Branch]:
        k_max = scenario.certify_k_max
        if scenario.family == "comb":
            return [Branch(k, j) for k in range(1, k_max + 1) for j in range(1, k + 1)]
        lo, hi = scenario.certify_j_range
        return [Branch(k, j) for k in range(1, k_max + 1) for j in range(lo, hi + 1)]

    def _base_operator(self, scenario: Scenario) -> LinearOp:
        window = lift_window(scenario.base_window, scenario.op_family)
        return self.operator_service.build_for_family(
            scenario.op_family, scenario.weights, window
        )

    def _line_operator(self, scenario: Scenario, pairs: list[tuple[Real, int]]) -> LinearOp:
        """One operator whose window holds every planned membership chain."""
        windows = [
            self.construction_service.plan_window(n, delta, scenario.weights, scenario.op_family)
            for delta, n in pairs
        ]
        window = lift_window(merge_windows(scenario.base_window, *windows), scenario.op_family)
        logger.debug(f"Membership chains share the window {window.to_json()}")
        op = self.operator_service.build_for_family(scenario.op_family, scenario.weights, window)
        _ = op.rows
        return op

    def _criterion_for(self, scenario: Scenario) -> CriterionService:
        if scenario.oracle_horizon == self.config.oracle_horizon:
            return self.criterion_service
        config = copy.copy(self.config)
        config.oracle_horizon = scenario.oracle_horizon
        return CriterionService(
            self.operator_service, CertificateService(self.operator_service, config), config
        )

    def _map(self, fn: Callable[[T], R], items: list[T]) -> list[R]:
        if self.config.jobs == 1 or len(items) < 2:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.config.jobs) as pool:
            return list(pool.map(fn, items))

    @staticmethod
    def _report(
        command: str,
        scenario: Scenario,
        entries: list[dict[str, Any]],
        notes: list[str] | None = None,
        passed: bool = True,
    ) -> Report:
        passed = passed and all(e.get("passed", True) for e in entries)
        return Report(
            command=command,
            scenario=scenario.name,
            scenario_hash=scenario.scenario_hash(),
            seed=scenario.seed,
            mode=scenario.mode.value,
            status="pass" if passed else "fail",
            entries=tuple(entries),
            notes=tuple(notes or ()),
        )
