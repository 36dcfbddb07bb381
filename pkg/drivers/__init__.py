from .provider import (
    SmoothDriver, DriverProvider, IdentityProvider, PolynomialProvider, CsvProvider, get_provider,
)
