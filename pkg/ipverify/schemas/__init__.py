from .distribution import B1Spec, B2Spec, DistSpec, GB1Spec, GB2Spec, dist_spec_adapter
from .experiment import IpExperimentConfig, VerificationReport
from .hde import FitCoeffs, HdeSpec
from .ipmap import FabSpec, FaInfSpec, FaZeroSpec, FInfBSpec, GdeltaSpec, MapSpec, PlanePoint, map_spec_adapter
from .quadrature import QuadratureConfig
from .report import SuiteReport, SuiteSection
from .run_config import (
    DensityRunConfig,
    HdeRunConfig,
    IpRunConfig,
    MapEvalRunConfig,
    MapsRunConfig,
    SampleRunConfig,
    TransformsRunConfig,
)
from .transform import ModelQuad, ResidualRecord, Role, TransformPoint

__all__ = [
    "B1Spec",
    "B2Spec",
    "DistSpec",
    "GB1Spec",
    "GB2Spec",
    "dist_spec_adapter",
    "IpExperimentConfig",
    "VerificationReport",
    "FitCoeffs",
    "HdeSpec",
    "FabSpec",
    "FaInfSpec",
    "FaZeroSpec",
    "FInfBSpec",
    "GdeltaSpec",
    "MapSpec",
    "PlanePoint",
    "map_spec_adapter",
    "QuadratureConfig",
    "SuiteReport",
    "SuiteSection",
    "DensityRunConfig",
    "HdeRunConfig",
    "IpRunConfig",
    "MapEvalRunConfig",
    "MapsRunConfig",
    "SampleRunConfig",
    "TransformsRunConfig",
    "ModelQuad",
    "ResidualRecord",
    "Role",
    "TransformPoint",
]
