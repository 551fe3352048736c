"""
Separability verdicts for invariant triples: necessary tests, sufficient
constructions and a catalog of positive-map witnesses
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config.parameters import DEFAULT_CHOI_MU_GRID
from src.config.settings import Settings, get_settings
from src.core.cones import (
    CertificateReport,
    TcpWitness,
    certify_tcp,
    ppt_test,
    psd_test,
    realignment_test,
    tcp_necessary_battery,
    verify_tcp_witness,
)
from src.core.docmaps import (
    CovariantMap,
    FalsifierResult,
    partial_action,
    positivity_falsifier,
    positivity_necessary,
)
from src.core.ldoi import InvariantClass, MatrixTriple, spectrum
from src.core.matcore import Tolerance
from src.utils.catalog_loader import CatalogLoader, CatalogWitness, get_catalog_loader, witness_id

logger = logging.getLogger("ldoi.detect")


class Outcome(str, Enum):
    SEPARABLE = "SEPARABLE"
    ENTANGLED = "ENTANGLED"
    UNDECIDED = "UNDECIDED"


@dataclass
class DetectionConfig:
    """Knobs of one detection run; unset fields come from Settings."""
    catalog: Optional[str] = None
    tolerance: Tolerance = field(default_factory=Tolerance)
    budget: int = 2000
    seed: int = 0
    jobs: int = 1
    exhaustive: bool = False
    mu_grid: Tuple[float, ...] = DEFAULT_CHOI_MU_GRID

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None, **overrides) -> "DetectionConfig":
        settings = settings or get_settings()
        config = cls(
            catalog=settings.LDOI_WITNESS_CATALOG,
            tolerance=Tolerance.from_settings(settings),
            budget=settings.LDOI_FALSIFIER_SAMPLES,
            seed=settings.LDOI_SEED,
            jobs=settings.LDOI_JOBS,
        )
        overrides = {k: v for k, v in overrides.items() if v is not None}
        return replace(config, **overrides)


@dataclass(frozen=True)
class Verdict:
    """Outcome plus the evidence that supports it.

    SEPARABLE carries a witness (or, for the ball and (d+1) criteria, the
    criterion name and margin); ENTANGLED carries the failed test or the
    detecting map id with the most negative eigenvalue it produced.
    """
    outcome: Outcome
    certificate: Optional[str] = None
    witness: Optional[TcpWitness] = None
    margin: Optional[float] = None
    map_id: Optional[str] = None
    min_eigenvalue: Optional[float] = None
    inconclusive: Tuple[str, ...] = ()
    certificates: Tuple[str, ...] = ()


@dataclass(frozen=True)
class WitnessEvaluation:
    map_id: str
    detected: bool
    min_eigenvalue: float
    report: CertificateReport


@dataclass(frozen=True)
class ScreenedWitness:
    map_id: str
    d: int
    accepted: bool
    reason: str = ""
    counterexample: Optional[FalsifierResult] = None


@dataclass(frozen=True)
class ScreeningReport:
    entries: Tuple[ScreenedWitness, ...]

    @property
    def accepted(self) -> bool:
        return all(e.accepted for e in self.entries)

    @property
    def rejected(self) -> List[ScreenedWitness]:
        return [e for e in self.entries if not e.accepted]


def evaluate_witness(
    t: MatrixTriple, witness: CatalogWitness, tol: Tolerance = Tolerance()
) -> WitnessEvaluation:
    """Apply the witness map to the first factor and test the image for PSD."""
    image = partial_action(witness.map, t)
    report = psd_test(image, tol)
    min_eig = float(np.min(spectrum(image, InvariantClass.LDOI).real))
    return WitnessEvaluation(witness.id, not report.passed, min_eig, report)


def screen_witness(
    witness: CatalogWitness, budget: int, seed: int = 0, tol: Tolerance = Tolerance()
) -> ScreenedWitness:
    """Reject maps that fail the necessary positivity checks or admit a falsifying product vector."""
    t = witness.map.triple
    report = positivity_necessary(t, tol)
    if not report.passed:
        return ScreenedWitness(witness.id, t.d, False, f"necessary positivity fails: {report.failed}")
    found = positivity_falsifier(t, budget, seed, tol)
    if found.found:
        return ScreenedWitness(witness.id, t.d, False,
                               f"falsifier found a negative pairing {found.value}", found)
    return ScreenedWitness(witness.id, t.d, True)


def as_catalog_witness(m: CovariantMap, name: str = "custom") -> CatalogWitness:
    return CatalogWitness(witness_id(name, {"d": m.d}), name, {"d": m.d}, m)


class DetectionService:
    """Runs the separability pipeline against a witness catalog"""

    def __init__(self, settings: Optional[Settings] = None, loader: Optional[CatalogLoader] = None):
        """Initialize the detection service.

        Args:
            settings: Application settings (uses global settings if not provided)
            loader: Witness catalog loader (uses the global loader if not provided)
        """
        self.settings = settings or get_settings()
        self._loader = loader

    def _catalog_loader(self, config: DetectionConfig) -> CatalogLoader:
        if config.catalog and (self._loader is None or self._loader.catalog_path != config.catalog):
            self._loader = CatalogLoader(config.catalog)
        if self._loader is None:
            self._loader = get_catalog_loader()
        return self._loader

    def default_config(self, **overrides) -> DetectionConfig:
        return DetectionConfig.from_settings(self.settings, **overrides)

    def separability_verdict(
        self,
        t: MatrixTriple,
        config: Optional[DetectionConfig] = None,
        extra_witnesses: Sequence[CatalogWitness] = (),
    ) -> Verdict:
        """Classify a state triple as SEPARABLE, ENTANGLED or UNDECIDED.

        Stages run in fixed order: PPT, realignment and the TCP battery,
        sufficient constructions, then the witness catalog. Extra witnesses
        are screened with the configured budget and evaluated before the
        catalog.

        Raises:
            ValueError: If the triple is not a PSD state candidate
        """
        config = config or self.default_config()
        tol = config.tolerance
        state = psd_test(t, tol)
        if not state.passed:
            raise ValueError(f"Not a state candidate: failed checks {state.failed}")

        found: List[Verdict] = []

        def record(verdict: Verdict) -> bool:
            found.append(verdict)
            return not config.exhaustive

        logger.info("stage ppt (d=%d)", t.d)
        ppt = ppt_test(t, tol)
        if not ppt.passed and record(self._failed_test("ppt", ppt)):
            return self._finish(found)

        logger.info("stage necessary battery")
        for report in (realignment_test(t, tol), tcp_necessary_battery(t, tol)):
            if not report.passed and record(self._failed_test(report.test, report)):
                return self._finish(found)

        if not found:
            logger.info("stage sufficient constructions")
            cert = certify_tcp(t, tol)
            if cert is not None:
                if cert.witness is not None and not verify_tcp_witness(t, cert.witness, tol):
                    raise RuntimeError(f"Certificate {cert.name} produced a witness that does not verify")
                return Verdict(Outcome.SEPARABLE, cert.name, cert.witness, cert.margin,
                               certificates=(cert.name,))

        logger.info("stage witness catalog")
        witnesses = self._screened_extras(extra_witnesses, config)
        witnesses += self._catalog_loader(config).witnesses_for(t.d, config.mu_grid)
        for evaluation in self._evaluate_all(t, witnesses, config):
            if evaluation.detected and record(Verdict(
                Outcome.ENTANGLED, "positive_map", margin=evaluation.report.worst_margin(),
                map_id=evaluation.map_id, min_eigenvalue=evaluation.min_eigenvalue,
            )):
                break

        if found:
            return self._finish(found)
        inconclusive = ("certify_tcp",) + tuple(w.id for w in witnesses)
        logger.info("undecided after %d witnesses", len(witnesses))
        return Verdict(Outcome.UNDECIDED, inconclusive=inconclusive)

    @staticmethod
    def _failed_test(name: str, report: CertificateReport) -> Verdict:
        logger.debug("%s fails: %s", name, report.failed)
        return Verdict(Outcome.ENTANGLED, name, margin=report.worst_margin())

    @staticmethod
    def _finish(found: List[Verdict]) -> Verdict:
        first = found[0]
        names = tuple(v.map_id or v.certificate for v in found)
        return replace(first, certificates=names)

    def _screened_extras(self, extras: Sequence[CatalogWitness], config: DetectionConfig) -> List[CatalogWitness]:
        kept = []
        for witness in extras:
            screened = screen_witness(witness, config.budget, config.seed, config.tolerance)
            if screened.accepted:
                kept.append(witness)
            else:
                logger.warning("skipping witness %s: %s", witness.id, screened.reason)
        return kept

    def _evaluate_all(
        self, t: MatrixTriple, witnesses: List[CatalogWitness], config: DetectionConfig
    ) -> List[WitnessEvaluation]:
        applicable = [w for w in witnesses if w.map.d == t.d]
        if config.jobs <= 1 or len(applicable) <= 1:
            return [evaluate_witness(t, w, config.tolerance) for w in applicable]
        # Executor.map keeps input order, so the first detecting map is the same for any job count
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            return list(pool.map(lambda w: evaluate_witness(t, w, config.tolerance), applicable))

    def screen_catalog(
        self, dims: Sequence[int] = (2, 3, 4), config: Optional[DetectionConfig] = None
    ) -> ScreeningReport:
        """Screen every catalog witness for each dimension it expands to."""
        config = config or self.default_config()
        loader = self._catalog_loader(config)
        entries = []
        for d in dims:
            for witness in loader.witnesses_for(d, config.mu_grid):
                screened = screen_witness(witness, config.budget, config.seed, config.tolerance)
                if not screened.accepted:
                    logger.warning("catalog witness %s rejected: %s", witness.id, screened.reason)
                entries.append(screened)
        return ScreeningReport(tuple(entries))

    # Same operation under its catalog-facing name
    witness_catalog_validate = screen_catalog

    def validate_configuration(self) -> Tuple[bool, List[str]]:
        """Validate detection configuration.

        Returns:
            Tuple of (is_valid, list of problems)
        """
        is_valid, problems = self.settings.validate_configuration()
        if is_valid:
            try:
                CatalogLoader(self.settings.LDOI_WITNESS_CATALOG).load_catalog()
            except (FileNotFoundError, ValueError) as e:
                problems.append(str(e))
        return (len(problems) == 0, problems)

    def get_health_status(self) -> Dict[str, Any]:
        """Get detection service health status.

        Returns:
            Dict containing service health information
        """
        is_valid, problems = self.validate_configuration()
        return {
            "configured": is_valid,
            "problems": problems,
            "catalog": self.settings.LDOI_WITNESS_CATALOG,
            "jobs": self.settings.LDOI_JOBS,
            "budget": self.settings.LDOI_FALSIFIER_SAMPLES,
        }


# Global service instance
_detection_service: Optional[DetectionService] = None


def get_detection_service() -> DetectionService:
    """Get or create the global DetectionService instance"""
    global _detection_service
    if _detection_service is None:
        _detection_service = DetectionService()
    return _detection_service
