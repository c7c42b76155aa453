"""Exception types shared across the solver modules."""


class SingularSystemError(ValueError):
    """A (near-)zero pivot appeared while factoring a tridiagonal system."""

    def __init__(self, index, pivot, message=None):
        self.index = int(index)
        self.pivot = float(pivot)
        if message is None:
            message = f"near-zero pivot {self.pivot:.3e} at row {self.index}"
        super().__init__(message)


class NewtonDivergenceError(RuntimeError):
    """Newton failed to reach the residual tolerance within the iteration budget."""

    def __init__(self, step, residual, message=None):
        self.step = int(step)
        self.residual = float(residual)
        if message is None:
            message = (
                f"Newton did not converge while producing time level {self.step} "
                f"(final residual {self.residual:.3e})"
            )
        super().__init__(message)


class CatalogError(ValueError):
    """An unknown scenario or group name was requested from the catalog."""
