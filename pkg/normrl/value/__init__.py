"""Value functions.

Functions
---------
    - QuantileValueFunction : N quantile bars per state, quantile Huber fit
    - ScalarValueFunction : scalar baseline, squared-error fit
    - huber, quantile_huber, quantile_huber_loss : losses
"""

from .quantile import (QuantileValueFunction, huber, quantile_huber,
                       quantile_huber_loss, quantile_huber_grad,
                       predict_quantiles, mean_value, fit_quantiles)
from .scalar import ScalarValueFunction, fit_scalar

__all__ = ['QuantileValueFunction', 'ScalarValueFunction',
           'huber', 'quantile_huber', 'quantile_huber_loss', 'quantile_huber_grad',
           'predict_quantiles', 'mean_value', 'fit_quantiles', 'fit_scalar']
