"""Natural-forking threat probabilities and their large-deviation decay rates."""

from .ar import (
    conjugate_ar_arrivals,
    conjugate_ar_queue,
    cumulant_ar_arrivals,
    gamma_ar,
    rate_ar,
    taylor_roots_ar,
)
from .errors import ForkRateError
from .iid import (
    conjugate_poisson,
    conjugate_queue_increment,
    cumulant_poisson_arrivals,
    effective_mu,
    effective_omega,
    forking_probability_iid,
    rate_iid,
)
from .many import (
    conjugate_many_arrivals,
    conjugate_many_queue,
    cumulant_many_arrivals,
    gamma_many,
    rate_many,
    taylor_roots_many,
)
from .params import ArParams, IidParams, ManyParams, Mode, RateResult, TailEstimate, validate

__version__ = "0.1.0"
