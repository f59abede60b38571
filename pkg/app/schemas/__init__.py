from app.schemas.spec_file import BandEntry, SpecFile, Tolerances
from app.schemas.design import (
    CertificateOut,
    CertifyRequest,
    Coefficients,
    DesignSummary,
    Envelope,
    KSweepOut,
    KSweepRequest,
    ResponseOut,
    ResponseRequest,
)
