# weakcurrent/models.py

import math
from typing import Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, root_validator, validator

QuadMethod = Literal["adaptive-polar", "cartesian-strip", "monte-carlo"]
RegionClass = Literal["O", "S", "none"]
Regime = Literal["quasi-ohmic", "crossover", "schwinger"]


class FrozenModel(BaseModel):
    class Config:
        frozen = True
        arbitrary_types_allowed = True


class UnitSystem(FrozenModel):
    """Physical constants consumed by every formula; planck_h is derived."""

    name: str = "custom"
    hbar: float
    e_charge: float
    v_f: float
    planck_h: float = 0.0

    @validator("hbar", "e_charge", "v_f")
    def _positive(cls, value, field):
        if not value > 0 or not math.isfinite(value):
            raise ValueError(f"{field.name} must be strictly positive, got {value}")
        return value

    @root_validator(skip_on_failure=True)
    def _derive_planck(cls, values):
        values["planck_h"] = 2.0 * math.pi * values["hbar"]
        return values

    @property
    def c(self) -> float:
        # the light-cone speed of the 2+1D Dirac problem is the Fermi velocity
        return self.v_f


class FieldConfig(FrozenModel):
    epsilon: float
    t_bal: float

    @validator("epsilon", "t_bal")
    def _positive(cls, value, field):
        if not value > 0:
            raise ValueError(f"{field.name} must be > 0, got {value}")
        return value


class MomentumPoint(FrozenModel):
    p_x: float
    p_y: float

    @property
    def magnitude(self) -> float:
        return math.hypot(self.p_x, self.p_y)

    def energy(self, units: UnitSystem) -> float:
        return units.v_f * self.magnitude


class ChiralitySpinor(FrozenModel):
    """Chirality part of a Dirac plane wave at momentum angle theta."""

    theta: float
    band: int

    @validator("band")
    def _band_sign(cls, value):
        if value not in (1, -1):
            raise ValueError(f"band must be +1 or -1, got {value}")
        return value

    @property
    def components(self) -> np.ndarray:
        half = 0.5 * self.theta
        return np.array(
            [np.exp(-1j * half), self.band * np.exp(1j * half)], dtype=complex
        ) / math.sqrt(2.0)


class WeakVelocity(FrozenModel):
    sigma_x_w: float
    sigma_y_w: float
    sigma_z_w: complex
    overlap: complex

    def group_velocity(self, units: UnitSystem) -> float:
        return units.v_f * self.sigma_x_w

    def as_dict(self) -> Dict[str, float]:
        return {
            "sigma_x_w": float(self.sigma_x_w),
            "sigma_y_w": float(self.sigma_y_w),
            "sigma_z_w_re": float(self.sigma_z_w.real),
            "sigma_z_w_im": float(self.sigma_z_w.imag),
            "overlap_re": float(self.overlap.real),
            "overlap_im": float(self.overlap.imag),
        }


class TransitionSpec(FrozenModel):
    """Transition (-E, (-p_x, p_y)) -> (+E, (p_x, p_y)) driven by field epsilon."""

    p: MomentumPoint
    units: UnitSystem
    epsilon: float


class TransitionKinematics(FrozenModel):
    delta_E: float
    delta_px: float
    delta_t: float
    delta_x: float
    v_g: float
    T: float = Field(..., ge=0.0, le=1.0)


class RegionConfig(FrozenModel):
    units: UnitSystem
    epsilon: float
    t_bal: float

    @validator("epsilon", "t_bal")
    def _positive(cls, value, field):
        if not value > 0:
            raise ValueError(f"{field.name} must be > 0, got {value}")
        return value

    @property
    def force(self) -> float:
        return self.units.e_charge * self.epsilon

    @property
    def k_V(self) -> float:
        # V: p_x^2 (p_x^2 + p_y^2) <= k_V^2
        return self.force * self.units.hbar / (4.0 * self.units.v_f)

    @property
    def r_B(self) -> float:
        return 0.5 * self.force * self.t_bal

    @property
    def r_F(self) -> float:
        return self.units.hbar / (2.0 * self.units.v_f * self.t_bal)

    @property
    def t_c(self) -> float:
        return math.sqrt(self.units.hbar / (self.force * self.units.v_f))

    @property
    def ratio(self) -> float:
        return self.t_bal / self.t_c


class RegionLabel(FrozenModel):
    in_V: bool
    in_B: bool
    in_F: bool
    klass: RegionClass


class QuadratureConfig(FrozenModel):
    method: QuadMethod = "adaptive-polar"
    rel_tol: float = 1e-9
    max_evals: int = 200000
    seed: int = 20140901
    mc_samples: int = 1000000
    workers: int = 1

    @validator("rel_tol")
    def _rel_tol_range(cls, value):
        if not 0.0 < value < 1.0:
            raise ValueError(f"rel_tol must lie in (0, 1), got {value}")
        return value

    @validator("max_evals")
    def _max_evals_floor(cls, value):
        if value < 1000:
            raise ValueError(f"max_evals must be >= 1000, got {value}")
        return value

    @validator("mc_samples", "workers")
    def _at_least_one(cls, value, field):
        if value < 1:
            raise ValueError(f"{field.name} must be >= 1, got {value}")
        return value


class IntegralEstimate(FrozenModel):
    """Value of a region integral with its error bound (or standard error for MC)."""

    value: float
    error: float
    evaluations: int
    method: QuadMethod


class CurrentResult(FrozenModel):
    epsilon: float
    t_bal: float
    t_c: float
    ratio: float
    power_O: float = Field(..., ge=0.0)
    sigma_O: float = Field(..., ge=0.0)
    rate_S: float = Field(..., ge=0.0)
    carrier_density: float = Field(..., ge=0.0)
    j_quasi: float = Field(..., ge=0.0)
    j_schwinger: float = Field(..., ge=0.0)
    j_total: float = Field(..., ge=0.0)
    regime: Regime
    method: QuadMethod = "adaptive-polar"
    model_extension: bool = False
    combination: str = "additive"
    power_O_stderr: Optional[float] = None
    rate_S_stderr: Optional[float] = None


class SweepRow(FrozenModel):
    epsilon: float
    t_bal: float
    t_c: float
    result: Optional[CurrentResult] = None
    error: Optional[str] = None


class RunConfig(FrozenModel):
    units_preset: Literal["natural", "si"] = "natural"
    constant_overrides: Dict[str, float] = Field(default_factory=dict)
    # None lets each subcommand pick: csv for tables, json for records
    output_format: Optional[Literal["csv", "json"]] = None
    output_path: Optional[str] = None
    quad: QuadratureConfig = Field(default_factory=QuadratureConfig)
    degeneracy: int = 1

    @validator("constant_overrides")
    def _known_constants(cls, value):
        known = {"hbar", "e_charge", "v_f"}
        unknown = sorted(set(value) - known)
        if unknown:
            raise ValueError(f"unknown constant keys: {', '.join(unknown)}")
        for key, constant in value.items():
            if not constant > 0:
                raise ValueError(f"{key} must be strictly positive, got {constant}")
        return value

    @validator("degeneracy")
    def _degeneracy_floor(cls, value):
        if value < 1:
            raise ValueError(f"degeneracy must be >= 1, got {value}")
        return value


def sweep_columns() -> List[str]:
    return [
        "eps",
        "t_bal",
        "t_c",
        "power_O",
        "sigma_O",
        "rate_S",
        "n",
        "j_quasi",
        "j_schwinger",
        "j_total",
        "regime",
        "degeneracy",
        "error",
        "model_extension",
        "combination",
    ]
