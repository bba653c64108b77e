"""Scikit-learn style front end for the link designer.

``MmdTransceiver.fit`` optimizes the precoder and antenna positions for one
channel realization (or samples one from ``random_state``); the fitted
object then detects received vectors with ``predict`` and estimates error
rates with ``simulate_ber``. Parameters follow the scikit-learn contract
(plain assignment in ``__init__``), so ``get_params``/``set_params``/
``clone`` compose with the usual tooling.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import as_rng
from .baselines import SCHEMES, solve_scheme
from .ber import BerResult, simulate_ber
from .channel import AntennaLayout, ChannelRealization, assemble_channel
from .codebook import build_codebook
from .config import SolverSettings, SystemConfig
from .metrics import min_distance, pep_upper_bound

__all__ = ["MmdTransceiver"]


class MmdTransceiver(BaseEstimator):
    """Joint precoder and antenna-position design for one spatial-modulation link.

    Parameters mirror :class:`~masm.config.SystemConfig` and
    :class:`~masm.config.SolverSettings`; ``min_spacing``/``region_tx``/
    ``region_rx`` default to half a wavelength and eight wavelengths.
    ``scheme`` picks the design: "ma" (move both arrays), "ma-tx"/"ma-rx"
    (one side), "gas" (greedy port selection) or "fpa" (precoder only).

    Attributes set by :meth:`fit`: ``w_`` (precoder weights), ``u_``/``v_``
    (positions), ``layout_``, ``channel_``, ``H_`` (channel matrix),
    ``codebook_``, ``d_min_`` (achieved minimum squared pair distance) and
    ``record_`` (convergence trace, AO schemes only).
    """

    def __init__(self, n_tx=4, n_rx=4, mod_order=4, n_paths=8, wavelength=0.05,
                 min_spacing=None, region_tx=None, region_rx=None,
                 power_budget=1.0, noise_power=1e-8, distance=40.0,
                 ref_power_gain=1e-3, pathloss_exp=2.5, constellation="psk",
                 scheme="ma", kappa=1e-3, max_iter=50, sca_tol=1e-4,
                 sca_max_iter=60, n_starts=1, init="fpa", gas_grid_step=None,
                 strict_paper_ordering=False, random_state=None):
        self.n_tx = n_tx
        self.n_rx = n_rx
        self.mod_order = mod_order
        self.n_paths = n_paths
        self.wavelength = wavelength
        self.min_spacing = min_spacing
        self.region_tx = region_tx
        self.region_rx = region_rx
        self.power_budget = power_budget
        self.noise_power = noise_power
        self.distance = distance
        self.ref_power_gain = ref_power_gain
        self.pathloss_exp = pathloss_exp
        self.constellation = constellation
        self.scheme = scheme
        self.kappa = kappa
        self.max_iter = max_iter
        self.sca_tol = sca_tol
        self.sca_max_iter = sca_max_iter
        self.n_starts = n_starts
        self.init = init
        self.gas_grid_step = gas_grid_step
        self.strict_paper_ordering = strict_paper_ordering
        self.random_state = random_state

    def system_config(self) -> SystemConfig:
        lam = self.wavelength
        return SystemConfig(
            n_tx=self.n_tx, n_rx=self.n_rx, mod_order=self.mod_order,
            n_paths=self.n_paths, wavelength=lam,
            min_spacing=lam / 2.0 if self.min_spacing is None else self.min_spacing,
            region_tx=8.0 * lam if self.region_tx is None else self.region_tx,
            region_rx=8.0 * lam if self.region_rx is None else self.region_rx,
            power_budget=self.power_budget, noise_power=self.noise_power,
            distance=self.distance, ref_power_gain=self.ref_power_gain,
            pathloss_exp=self.pathloss_exp, constellation=self.constellation,
        )

    def solver_settings(self) -> SolverSettings:
        return SolverSettings(
            kappa=self.kappa, max_iter=self.max_iter, sca_tol=self.sca_tol,
            sca_max_iter=self.sca_max_iter, n_starts=self.n_starts, init=self.init,
            gas_grid_step=self.gas_grid_step,
            strict_paper_ordering=self.strict_paper_ordering,
        )

    def fit(self, X=None, y=None):
        """Optimize the link for a channel realization.

        ``X`` is a :class:`~masm.channel.ChannelRealization`; ``None`` samples
        one from ``random_state``. ``y`` is ignored (present for API
        compatibility).
        """
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        cfg = self.system_config()
        settings = self.solver_settings()
        rng = as_rng(self.random_state)
        if X is None:
            from .channel import sample_channel
            ch = sample_channel(cfg, rng)
        elif isinstance(X, ChannelRealization):
            ch = X
        else:
            raise TypeError(
                f"X must be a ChannelRealization or None, got {type(X).__name__}"
            )
        w, layout, record = solve_scheme(self.scheme, cfg, ch, settings, rng)
        self.config_ = cfg
        self.channel_ = ch
        self.w_ = w
        self.layout_ = layout
        self.u_ = layout.u
        self.v_ = layout.v
        self.codebook_ = build_codebook(cfg.n_tx, cfg.mod_order, cfg.constellation)
        self.H_ = assemble_channel(layout, ch, cfg)
        self.d_min_ = min_distance(self.H_, w, self.codebook_).d_min
        self.record_ = record
        return self

    def predict(self, Y) -> np.ndarray:
        """ML-detect received vectors; returns codebook symbol indices.

        ``Y`` has shape (n_samples, n_rx) or (n_rx,).
        """
        check_is_fitted(self, "w_")
        Y = np.asarray(Y, dtype=complex)
        if Y.ndim == 1:
            Y = Y[None, :]
        if Y.ndim != 2 or Y.shape[1] != self.config_.n_rx:
            raise ValueError(
                f"Y must have {self.config_.n_rx} columns, got shape {Y.shape}"
            )
        S = (self.H_ * self.w_[None, :]) @ self.codebook_.vectors
        residuals = (np.sum(np.abs(S) ** 2, axis=0)[None, :]
                     - 2.0 * np.real(Y @ S.conj()))
        return np.argmin(residuals, axis=1)

    def pep_bound(self, noise_power=None) -> float:
        """Union bound on the symbol error probability of the fitted link."""
        check_is_fitted(self, "w_")
        if noise_power is None:
            noise_power = self.config_.noise_power
        return pep_upper_bound(self.d_min_, noise_power, self.codebook_.n_pairs)

    def simulate_ber(self, snr_db, rng=None, receive_referenced=True,
                     **kwargs) -> BerResult:
        """Monte Carlo BER of the fitted link at the given SNR.

        With ``receive_referenced=True`` (default) the SNR is the ratio of
        the mean received power of one radiated symbol to the noise power,
        matching the experiment sweeps.
        """
        check_is_fitted(self, "w_")
        ref = self.config_.avg_channel_gain / self.config_.n_tx if receive_referenced else 1.0
        return simulate_ber(self.H_, self.w_, self.codebook_, snr_db,
                            self.config_.power_budget, rng=as_rng(rng),
                            ref_gain=ref, **kwargs)
