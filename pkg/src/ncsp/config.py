"""Centralized numerical tolerances and search budgets."""

from dataclasses import asdict, dataclass, field, replace


@dataclass(frozen=True)
class Tolerances:
    svd_reconstruction: float = 1e-12
    basis_gram: float = 1e-10
    witness_replay: float = 1e-9
    eigen_floor: float = 1e-8
    psd_slack: float = 1e-12
    barrier_gap: float = 1e-6
    overlap: float = 1e-9


@dataclass(frozen=True)
class Budgets:
    cb_restarts: int = 25
    sp_restarts: int = 16
    eq2_samples: int = 64
    eq2_ascents: int = 8
    interp_degree: int = 12
    interp_grid: int = 64
    interp_spacing: float = 0.5
    pi_m_max: int = 8


@dataclass(frozen=True)
class Config:
    tol: Tolerances = field(default_factory=Tolerances)
    budget: Budgets = field(default_factory=Budgets)

    def to_dict(self):
        return asdict(self)

    def with_overrides(self, **kw):
        tol = {k: v for k, v in kw.items() if k in Tolerances.__dataclass_fields__}
        bud = {k: v for k, v in kw.items() if k in Budgets.__dataclass_fields__}
        return Config(replace(self.tol, **tol), replace(self.budget, **bud))


DEFAULT = Config()
