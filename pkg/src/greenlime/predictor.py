"""Black-box prediction functions f: R^m -> R with evaluation accounting."""
import queue
import shlex
import subprocess
import threading
import time

import numpy as np

from .errors import (
    DimensionMismatch,
    PredictorFailure,
    PredictorTimeout,
    ProcessSpawnFailure,
    ProtocolViolation,
    ValidationError,
)


class Predictor:
    """Batch evaluation interface; subclasses implement ``_evaluate``.

    ``call_count`` counts individual rows, never batches.
    """

    n_features = None

    def __init__(self):
        self.call_count = 0
        self._count_lock = threading.Lock()

    def _evaluate(self, xs):
        raise NotImplementedError

    def predict_batch(self, xs):
        xs = np.asarray(xs, dtype=np.float64)
        if xs.ndim == 1:
            xs = xs[None, :] if xs.size else xs.reshape(0, self.n_features or 0)
        if xs.ndim != 2:
            raise DimensionMismatch("predictor input must be a batch of row vectors")
        if xs.shape[0] == 0:
            return np.zeros(0)
        if self.n_features is not None and xs.shape[1] != self.n_features:
            raise DimensionMismatch(f"predictor expects {self.n_features} features, got {xs.shape[1]}")
        with self._count_lock:
            self.call_count += xs.shape[0]
        try:
            ys = np.asarray(self._evaluate(xs), dtype=np.float64).reshape(-1)
        except PredictorFailure:
            raise
        except Exception as exc:
            raise PredictorFailure(f"prediction failed: {exc!r}") from exc
        if ys.shape[0] != xs.shape[0]:
            raise PredictorFailure(f"{ys.shape[0]} predictions for {xs.shape[0]} rows")
        bad = np.flatnonzero(~np.isfinite(ys))
        if bad.size:
            raise PredictorFailure("non-finite prediction", row=int(bad[0]))
        return ys

    def __call__(self, xs):
        return self.predict_batch(xs)

    def close(self):
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class PolynomialModel(Predictor):
    """Univariate polynomial c0 + c1 x + ... + ck x^k."""

    n_features = 1

    def __init__(self, coefficients):
        super().__init__()
        c = np.array(coefficients, dtype=np.float64).reshape(-1)
        if c.size == 0 or c.size > 17:
            raise ValidationError("polynomial needs between 1 and 17 coefficients (degree <= 16)")
        if not np.all(np.isfinite(c)):
            raise ValidationError("polynomial coefficients must be finite")
        c.setflags(write=False)
        self.coefficients = c

    def _evaluate(self, xs):
        return np.polynomial.polynomial.polyval(xs[:, 0], self.coefficients)

    def __repr__(self):
        return f"PolynomialModel({self.coefficients.tolist()})"


class LinearModel(Predictor):
    """a + b . x, for any number of features."""

    def __init__(self, intercept, slopes):
        super().__init__()
        self.intercept = float(intercept)
        self.slopes = np.array(slopes, dtype=np.float64).reshape(-1)
        self.n_features = self.slopes.size

    def _evaluate(self, xs):
        return self.intercept + xs @ self.slopes


class FunctionPredictor(Predictor):
    """Wrap a plain callable taking an (n, m) array."""

    def __init__(self, fn, n_features=None):
        super().__init__()
        self.fn = fn
        self.n_features = n_features

    def _evaluate(self, xs):
        return self.fn(xs)


class SubprocessPredictor(Predictor):
    """Serve predictions from a long-running external process.

    Each row is written to the child's stdin as one comma-separated line; the
    child answers with one decimal number per line, in order. Batches are
    serialized through a single process.
    """

    def __init__(self, command, timeout=30.0, n_features=None):
        super().__init__()
        self.command = command
        self.timeout = float(timeout)
        self.n_features = n_features
        self._lock = threading.Lock()
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        if not argv:
            raise ProcessSpawnFailure("empty command")
        try:
            self._proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            raise ProcessSpawnFailure(f"cannot start {command!r}: {exc}") from exc
        self._lines = queue.Queue()
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()

    def _pump(self):
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def _evaluate(self, xs):
        with self._lock:
            if self._proc.poll() is not None:
                raise ProtocolViolation(f"process exited with status {self._proc.returncode}")
            payload = "".join(",".join(repr(float(v)) for v in row) + "\n" for row in xs)
            try:
                self._proc.stdin.write(payload)
                self._proc.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                raise ProtocolViolation(f"cannot write to process: {exc}") from exc
            out = np.empty(xs.shape[0])
            deadline = time.monotonic() + self.timeout
            for i in range(xs.shape[0]):
                try:
                    line = self._lines.get(timeout=max(deadline - time.monotonic(), 0.0))
                except queue.Empty:
                    raise PredictorTimeout(f"batch not answered within {self.timeout} s", row=i) from None
                if line is None:
                    raise ProtocolViolation("process closed its output early", row=i)
                try:
                    out[i] = float(line.strip())
                except ValueError:
                    raise ProtocolViolation(f"non-numeric answer {line.strip()!r}", row=i) from None
            if not self._lines.empty():
                raise ProtocolViolation("process answered more lines than rows sent")
            return out

    def close(self):
        proc = getattr(self, "_proc", None)
        if proc is None or proc.poll() is not None:
            return
        try:
            proc.stdin.close()
            proc.wait(timeout=5)
        except (OSError, subprocess.TimeoutExpired):
            proc.kill()
            proc.wait()

    def __del__(self):
        self.close()


def parse_predictor(spec, timeout=30.0):
    """Build a predictor from ``poly:c0,c1,...``, ``linear:a,b1,...`` or ``cmd:<command>``."""
    kind, sep, body = spec.partition(":")
    if not sep:
        raise ValidationError(f"predictor spec {spec!r} lacks a 'kind:' prefix")
    if kind == "cmd":
        if not body.strip():
            raise ValidationError("cmd: predictor needs a command")
        return SubprocessPredictor(body, timeout=timeout)
    if kind in ("poly", "linear"):
        try:
            values = [float(v) for v in body.split(",")]
        except ValueError:
            raise ValidationError(f"bad coefficients in predictor spec {spec!r}") from None
        if kind == "poly":
            return PolynomialModel(values)
        if len(values) < 2:
            raise ValidationError("linear: predictor needs an intercept and at least one slope")
        return LinearModel(values[0], values[1:])
    raise ValidationError(f"unknown predictor kind {kind!r}")
