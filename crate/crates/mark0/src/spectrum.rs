//! Power-spectrum estimation and the Ornstein-Uhlenbeck (Lorentzian) fit
//! used to measure the diverging relaxation time near the continuous
//! employment transition.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::math;
use crate::observables::mean;

/// Minimum admissible transform length; shorter windows give unusable fits.
pub const MIN_SPECTRUM_LEN: usize = 1 << 10;

/// One-sided power spectrum on the angular frequencies `omega_k = 2 pi k / n`
/// for `k = 1 ..= n/2`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub power: Vec<f64>,
}

/// Result of the Lorentzian fit `I(omega) = i0 * omega0^2 / (omega0^2 + omega^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OuFit {
    pub i0: f64,
    pub omega0: f64,
    /// RMS residual in log-power space over the fitted band.
    pub residual: f64,
    /// The minimizer ran into the upper edge of the search bracket: the
    /// spectrum has no resolvable knee (e.g. white noise) and `omega0` is
    /// not meaningful.
    pub pinned_high: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumError {
    /// Post-equilibration window shorter than [`MIN_SPECTRUM_LEN`].
    TooShort { available: usize },
    /// Power values were zero or negative over the fit band (constant or
    /// degenerate series).
    DegeneratePower,
    /// Fewer than two usable points in the fit band.
    BandTooNarrow,
}

impl fmt::Display for SpectrumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumError::TooShort { available } => write!(
                f,
                "series too short for spectral analysis: {} < {} post-equilibration samples",
                available, MIN_SPECTRUM_LEN
            ),
            SpectrumError::DegeneratePower => {
                write!(f, "spectrum is degenerate (zero power in the fit band)")
            }
            SpectrumError::BandTooNarrow => write!(f, "fit band has fewer than two points"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SpectrumError {}

/// In-place radix-2 decimation-in-time FFT. `re`/`im` length must be a
/// power of two. Twiddles come from a precomputed table, so there is no
/// phase-accumulation error at long lengths.
pub fn fft_in_place(re: &mut [f64], im: &mut [f64]) {
    let n = re.len();
    assert_eq!(n, im.len());
    assert!(n.is_power_of_two(), "fft length must be a power of two");
    if n < 2 {
        return;
    }
    // Bit-reversal permutation.
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            re.swap(i, j);
            im.swap(i, j);
        }
    }
    // Twiddle table for the full length: w[k] = exp(-2 pi i k / n).
    let half = n / 2;
    let mut wre = Vec::with_capacity(half);
    let mut wim = Vec::with_capacity(half);
    for k in 0..half {
        let angle = -2.0 * PI * k as f64 / n as f64;
        wre.push(math::cos(angle));
        wim.push(math::sin(angle));
    }
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        let mut start = 0;
        while start < n {
            for k in 0..len / 2 {
                let (twr, twi) = (wre[k * stride], wim[k * stride]);
                let (i, j) = (start + k, start + k + len / 2);
                let tr = re[j] * twr - im[j] * twi;
                let ti = re[j] * twi + im[j] * twr;
                re[j] = re[i] - tr;
                im[j] = im[i] - ti;
                re[i] += tr;
                im[i] += ti;
            }
            start += len;
        }
        len <<= 1;
    }
}

/// One-sided power spectrum of the mean-removed series after discarding the
/// first `t_eq` samples and truncating down to a power of two. Powers are
/// `|X_k|^2 / n` for `k = 1 ..= n/2`.
pub fn power_spectrum(series: &[f64], t_eq: usize) -> Result<Spectrum, SpectrumError> {
    let available = series.len().saturating_sub(t_eq);
    if available < MIN_SPECTRUM_LEN {
        return Err(SpectrumError::TooShort { available });
    }
    // Largest power of two at most `available`.
    let n = 1usize << (usize::BITS - 1 - available.leading_zeros());
    debug_assert!(n.is_power_of_two() && n <= available && available < 2 * n);
    let window = &series[t_eq..t_eq + n];
    let m = mean(window);
    let mut re: Vec<f64> = window.iter().map(|&x| x - m).collect();
    let mut im = alloc::vec![0.0; n];
    fft_in_place(&mut re, &mut im);
    let mut omega = Vec::with_capacity(n / 2);
    let mut power = Vec::with_capacity(n / 2);
    for k in 1..=n / 2 {
        omega.push(2.0 * PI * k as f64 / n as f64);
        power.push((re[k] * re[k] + im[k] * im[k]) / n as f64);
    }
    Ok(Spectrum { omega, power })
}

/// Geometric moving average of the power over a window of bins (the raw
/// periodogram is exponentially noisy per bin; averaging the log tames it
/// without biasing the knee position).
pub fn log_window_average(spectrum: &Spectrum, window: usize) -> Spectrum {
    let n = spectrum.power.len();
    let w = window.max(1);
    let mut logs: Vec<f64> = Vec::with_capacity(n);
    for &p in &spectrum.power {
        logs.push(math::ln(p.max(f64::MIN_POSITIVE)));
    }
    // Prefix sums for O(1) window means.
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for (i, &l) in logs.iter().enumerate() {
        prefix.push(prefix[i] + l);
    }
    let mut power = Vec::with_capacity(n);
    for i in 0..n {
        let lo = i.saturating_sub(w / 2);
        let hi = (i + w.div_ceil(2)).min(n);
        let avg = (prefix[hi] - prefix[lo]) / (hi - lo) as f64;
        power.push(math::exp(avg));
    }
    Spectrum {
        omega: spectrum.omega.clone(),
        power,
    }
}

/// Band of spectrum bins used by [`fit_ou`]: the lowest bins carry
/// finite-length bias and the highest frequencies leave the regime where
/// the Lorentzian approximation holds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitBand {
    /// Number of lowest-frequency bins excluded.
    pub skip_low: usize,
    /// Upper angular-frequency cutoff.
    pub max_omega: f64,
}

impl Default for FitBand {
    fn default() -> Self {
        Self {
            skip_low: 3,
            max_omega: PI / 4.0,
        }
    }
}

/// Least-squares fit of `log I` to the Lorentzian form over the band,
/// minimized over `log omega0` by golden-section search (the amplitude is
/// profiled out analytically). A flat spectrum pushes the knee to the upper
/// bracket edge and is flagged `pinned_high`.
pub fn fit_ou(spectrum: &Spectrum, band: FitBand) -> Result<OuFit, SpectrumError> {
    let mut omegas = Vec::new();
    let mut log_powers = Vec::new();
    for (i, (&w, &p)) in spectrum.omega.iter().zip(&spectrum.power).enumerate() {
        if i < band.skip_low || w > band.max_omega {
            continue;
        }
        if p <= 0.0 {
            return Err(SpectrumError::DegeneratePower);
        }
        omegas.push(w);
        log_powers.push(math::ln(p));
    }
    if omegas.len() < 2 {
        return Err(SpectrumError::BandTooNarrow);
    }

    let lo = math::ln(omegas[0] / 100.0);
    let hi = math::ln(omegas[omegas.len() - 1] * 100.0);

    // Sum of squared residuals with the optimal log-amplitude profiled out.
    let objective = |log_w0: f64| -> (f64, f64) {
        let w0 = math::exp(log_w0);
        let w0sq = w0 * w0;
        let mut shift = 0.0;
        for (&w, &lp) in omegas.iter().zip(&log_powers) {
            shift += lp - math::ln(w0sq / (w0sq + w * w));
        }
        let log_i0 = shift / omegas.len() as f64;
        let mut sse = 0.0;
        for (&w, &lp) in omegas.iter().zip(&log_powers) {
            let r = lp - log_i0 - math::ln(w0sq / (w0sq + w * w));
            sse += r * r;
        }
        (sse, log_i0)
    };

    // Golden-section search on the smooth 1-D profile.
    let inv_phi = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, _) = objective(c);
    let (mut fd, _) = objective(d);
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c).0;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d).0;
        }
        if b - a < 1e-12 {
            break;
        }
    }
    let log_w0 = 0.5 * (a + b);
    let (sse, log_i0) = objective(log_w0);
    let omega0 = math::exp(log_w0);
    let band_top = omegas[omegas.len() - 1];
    Ok(OuFit {
        i0: math::exp(log_i0),
        omega0,
        residual: math::sqrt(sse / omegas.len() as f64),
        pinned_high: omega0 >= band_top,
    })
}

/// Analytic Lorentzian, exposed for tests and synthetic oracles.
pub fn ou_power(omega: f64, i0: f64, omega0: f64) -> f64 {
    i0 * omega0 * omega0 / (omega0 * omega0 + omega * omega)
}
