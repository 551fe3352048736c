"""
Utility for loading and validating the positive-map witness catalog from YAML
"""
import inspect
import itertools
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import yaml
from pydantic import BaseModel, Field

from src.config.parameters import DEFAULT_CHOI_MU_GRID
from src.config.settings import get_settings
from src.core.docmaps import CovariantMap
from src.gallery.families import generate, get_family

logger = logging.getLogger("ldoi.catalog")

MU_GRID_TOKEN = "mu_grid"


class CatalogEntry(BaseModel):
    """One witness family, possibly expanding to several maps"""
    family: str
    description: str = ""
    params: Dict[str, Any] = Field(default_factory=dict)
    grid: Dict[str, Union[List[Any], str]] = Field(default_factory=dict)
    sweep: Optional[str] = None
    dims: Optional[List[int]] = None
    min_dim: int = Field(default=1, ge=1)


class WitnessCatalog(BaseModel):
    """Root catalog configuration"""
    version: int = 1
    entries: List[CatalogEntry]


@dataclass(frozen=True)
class CatalogWitness:
    """A concrete positive map from the catalog, ready for evaluation."""
    id: str
    family: str
    params: Dict[str, Any]
    map: CovariantMap


def _format_value(value: Any) -> str:
    return format(value, "g") if isinstance(value, float) else str(value)


def witness_id(family: str, params: Dict[str, Any]) -> str:
    """choi_cho(1,2,0), lambda(3), ..."""
    return f"{family}({','.join(_format_value(v) for v in params.values())})"


def _substitute(value: Any, d: int) -> Any:
    if isinstance(value, str) and "{d}" in value:
        return int(value.replace("{d}", str(d)))
    return value


class CatalogLoader:
    """Loader for YAML witness catalogs with validation"""

    def __init__(self, catalog_path: Optional[str] = None):
        """Initialize the catalog loader"""
        self.catalog_path = catalog_path or get_settings().LDOI_WITNESS_CATALOG
        self._catalog: Optional[WitnessCatalog] = None

    def load_catalog(self) -> WitnessCatalog:
        """Load and validate the catalog from its YAML file"""
        if self._catalog is not None:
            return self._catalog

        try:
            with open(self.catalog_path, "r") as file:
                data = yaml.safe_load(file)
            catalog = WitnessCatalog(**(data or {}))
            for entry in catalog.entries:
                spec = get_family(entry.family)
                if spec.kind != "map":
                    raise ValueError(f"Catalog family {entry.family} is not a map family")
            self._catalog = catalog
            return self._catalog
        except FileNotFoundError:
            raise  # Re-raise FileNotFoundError as is
        except yaml.YAMLError as e:
            raise ValueError(f"Error parsing YAML file: {e}")
        except Exception as e:
            raise ValueError(f"Error loading witness catalog: {e}")

    def expand_entry(
        self, entry: CatalogEntry, d: int, mu_grid: Sequence[float] = DEFAULT_CHOI_MU_GRID
    ) -> List[CatalogWitness]:
        """Concrete maps of one entry for local dimension d, in deterministic order."""
        if entry.dims is not None and d not in entry.dims:
            return []
        if d < entry.min_dim:
            return []

        base = {key: _substitute(value, d) for key, value in entry.params.items()}
        axes: List[tuple] = []
        for key, values in entry.grid.items():
            if values == MU_GRID_TOKEN:
                values = list(mu_grid)
            elif isinstance(values, str):
                raise ValueError(f"Unknown grid token: {values}. Available: ['{MU_GRID_TOKEN}']")
            axes.append((key, [_substitute(v, d) for v in values]))
        if entry.sweep:
            axes.append((entry.sweep, list(range(1, d))))

        keys = [key for key, _ in axes]
        witnesses = []
        for combo in itertools.product(*(values for _, values in axes)):
            params = dict(base)
            params.update(zip(keys, combo))
            ordered = _ordered_params(entry.family, params)
            m = generate(entry.family, ordered)
            if m.d != d:
                raise ValueError(f"Catalog map {witness_id(entry.family, ordered)} acts on d={m.d}, expected {d}")
            witnesses.append(CatalogWitness(witness_id(entry.family, ordered), entry.family, ordered, m))
        return witnesses

    def witnesses_for(self, d: int, mu_grid: Sequence[float] = DEFAULT_CHOI_MU_GRID) -> List[CatalogWitness]:
        """All catalog maps applicable to dimension d"""
        catalog = self.load_catalog()
        witnesses: List[CatalogWitness] = []
        for entry in catalog.entries:
            witnesses.extend(self.expand_entry(entry, d, mu_grid))
        logger.debug("catalog %s expands to %d witnesses for d=%d", self.catalog_path, len(witnesses), d)
        return witnesses


def _ordered_params(family: str, params: Dict[str, Any]) -> Dict[str, Any]:
    """Parameters in the builder's signature order, so ids read like calls."""
    names = list(inspect.signature(get_family(family).builder).parameters)
    ordered = {name: params[name] for name in names if name in params}
    ordered.update({k: v for k, v in params.items() if k not in ordered})
    return ordered


# Global instance
_catalog_loader: Optional[CatalogLoader] = None


def get_catalog_loader() -> CatalogLoader:
    """Get or create the global catalog loader instance"""
    global _catalog_loader
    if _catalog_loader is None:
        _catalog_loader = CatalogLoader()
    return _catalog_loader


def load_catalog_file(path: Union[str, Path]) -> CatalogLoader:
    """Loader bound to an explicit catalog file (validated eagerly)"""
    loader = CatalogLoader(str(path))
    loader.load_catalog()
    return loader
