from app.models.filter import (
    Band,
    BandSpec,
    CoeffDomain,
    DesignSpec,
    FirFilter,
    FrequencyGrid,
    PhaseKind,
    PhaseSelection,
)
from app.models.design import (
    AutocorrSequence,
    BasisFamily,
    BasisKind,
    ConstraintReport,
    KSweep,
    KSweepPoint,
    WeightEvaluation,
    WeightSolution,
    ZeroPhaseDesign,
)
from app.models.factor import FactorizationReport, FactorMethod, ZeroPair, ZeroSet
from app.models.certificate import AdjustedTargets, Certificate, CertificateSource, DeviationReport
from app.models.result import DesignOptions, DesignResult, WeightMethod
