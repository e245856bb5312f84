//! Corrugation profiles `z = h(x, y)` and their spectral lines.
//!
//! A profile is a sum of cosine modes plus, optionally, a periodic sampled
//! height grid. Its spectrum is a finite list of lines `(q, c_q)` with
//! `h(r) = Σ c_q exp(i q·r)`, which turns the wave-vector integral of the
//! first-order energy into a sum.

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::kernels::WaveVector;

/// `amplitude · cos(q·r + phase)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CosineMode {
    pub amplitude: f64,
    pub wavevector: WaveVector,
    pub phase: f64,
}

impl CosineMode {
    pub fn new(amplitude: f64, wavevector: WaveVector, phase: f64) -> Result<Self> {
        if !(amplitude >= 0.0 && amplitude.is_finite()) {
            return Err(Error::domain(format!("mode amplitude must be >= 0, got {amplitude}")));
        }
        Ok(Self {
            amplitude,
            wavevector,
            phase,
        })
    }

    pub fn eval(&self, r: (f64, f64)) -> f64 {
        self.amplitude * (self.wavevector.dot(r) + self.phase).cos()
    }
}

/// Periodic height map: `heights[iy * nx + ix]` is the height at
/// `(ix · dx, iy · dy)`; the map repeats with periods `nx·dx` and `ny·dy`.
#[derive(Clone, Debug, PartialEq)]
pub struct HeightGrid {
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
    heights: Vec<f64>,
}

impl HeightGrid {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64, heights: Vec<f64>) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::domain("height grid needs nx, ny >= 1"));
        }
        if !(dx > 0.0 && dy > 0.0) {
            return Err(Error::domain("grid spacings must be positive"));
        }
        if heights.len() != nx * ny {
            return Err(Error::domain(format!(
                "expected {} heights for a {nx}x{ny} grid, got {}",
                nx * ny,
                heights.len()
            )));
        }
        if heights.iter().any(|h| !h.is_finite()) {
            return Err(Error::domain("grid heights must be finite"));
        }
        Ok(Self {
            nx,
            ny,
            dx,
            dy,
            heights,
        })
    }

    /// Reads the CSV height-map format: a header row `nx,ny,dx_m,dy_m`
    /// (names, followed by a row of values; or the values directly), then
    /// `nx * ny` heights in metres, row-major with x varying fastest.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut records = rdr.records();
        let mut next_fields = || -> Result<Option<Vec<String>>> {
            match records.next() {
                Some(rec) => Ok(Some(rec?.iter().filter(|s| !s.is_empty()).map(str::to_owned).collect())),
                None => Ok(None),
            }
        };
        let bad = |msg: &str| Error::Config(format!("height map: {msg}"));
        let mut header = next_fields()?.ok_or_else(|| bad("empty file"))?;
        if header.first().map(|s| s.parse::<f64>().is_err()).unwrap_or(true) {
            let names: Vec<String> = header.iter().map(|s| s.to_ascii_lowercase()).collect();
            if names != ["nx", "ny", "dx_m", "dy_m"] {
                return Err(bad("header must be nx,ny,dx_m,dy_m"));
            }
            header = next_fields()?.ok_or_else(|| bad("missing header values"))?;
        }
        if header.len() != 4 {
            return Err(bad("header needs exactly four values"));
        }
        let nx: usize = header[0].parse().map_err(|_| bad("nx must be an integer"))?;
        let ny: usize = header[1].parse().map_err(|_| bad("ny must be an integer"))?;
        let dx: f64 = header[2].parse().map_err(|_| bad("dx_m must be a number"))?;
        let dy: f64 = header[3].parse().map_err(|_| bad("dy_m must be a number"))?;
        let mut heights = Vec::with_capacity(nx * ny);
        while let Some(fields) = next_fields()? {
            for f in fields {
                heights.push(f.parse::<f64>().map_err(|_| bad(&format!("bad height '{f}'")))?);
            }
        }
        HeightGrid::new(nx, ny, dx, dy, heights)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn spacing(&self) -> (f64, f64) {
        (self.dx, self.dy)
    }

    pub fn period(&self) -> (f64, f64) {
        (self.nx as f64 * self.dx, self.ny as f64 * self.dy)
    }

    pub fn height(&self, ix: usize, iy: usize) -> f64 {
        self.heights[iy * self.nx + ix]
    }

    fn max_abs(&self) -> f64 {
        self.heights.iter().fold(0.0, |m, h| m.max(h.abs()))
    }

    /// Bilinear interpolation inside `[0, (nx−1)dx] × [0, (ny−1)dy]`.
    fn interpolate(&self, x: f64, y: f64) -> Result<f64> {
        let (lx, ly) = ((self.nx - 1) as f64 * self.dx, (self.ny - 1) as f64 * self.dy);
        let slack = 1e-12;
        if x < -slack * self.dx || y < -slack * self.dy || x > lx * (1.0 + slack) || y > ly * (1.0 + slack) {
            return Err(Error::OutOfGrid { x, y });
        }
        Ok(self.bilinear(x.clamp(0.0, lx), y.clamp(0.0, ly), false))
    }

    /// Bilinear interpolation on the periodic extension.
    fn interpolate_periodic(&self, x: f64, y: f64) -> f64 {
        let (px, py) = self.period();
        self.bilinear(x.rem_euclid(px), y.rem_euclid(py), true)
    }

    fn bilinear(&self, x: f64, y: f64, wrap: bool) -> f64 {
        let cell = |v: f64, d: f64, n: usize| -> (usize, usize, f64) {
            if n == 1 {
                return (0, 0, 0.0);
            }
            let s = v / d;
            let i = (s.floor() as usize).min(if wrap { n - 1 } else { n - 2 });
            let t = s - i as f64;
            let j = if wrap { (i + 1) % n } else { i + 1 };
            (i, j, t)
        };
        let (i0, i1, tx) = cell(x, self.dx, self.nx);
        let (j0, j1, ty) = cell(y, self.dy, self.ny);
        let h00 = self.height(i0, j0);
        let h10 = self.height(i1, j0);
        let h01 = self.height(i0, j1);
        let h11 = self.height(i1, j1);
        (1.0 - ty) * ((1.0 - tx) * h00 + tx * h10) + ty * ((1.0 - tx) * h01 + tx * h11)
    }

    /// Discrete Fourier lines, normalised so that the trigonometric
    /// interpolant `Σ c exp(i q·r)` reproduces the samples exactly.
    /// Nyquist components are split evenly between `+q` and `−q`.
    fn spectral_lines(&self) -> Vec<SpectralLine> {
        let (nx, ny) = (self.nx, self.ny);
        let mut data: Vec<Complex64> = self.heights.iter().map(|&h| Complex64::new(h, 0.0)).collect();
        let mut planner = FftPlanner::<f64>::new();
        let fx = planner.plan_fft_forward(nx);
        for row in data.chunks_mut(nx) {
            fx.process(row);
        }
        let fy = planner.plan_fft_forward(ny);
        let mut column = vec![Complex64::new(0.0, 0.0); ny];
        for ix in 0..nx {
            for iy in 0..ny {
                column[iy] = data[iy * nx + ix];
            }
            fy.process(&mut column);
            for iy in 0..ny {
                data[iy * nx + ix] = column[iy];
            }
        }
        let norm = 1.0 / (nx * ny) as f64;
        let peak = data.iter().fold(0.0f64, |m, c| m.max(c.norm())) * norm;
        let cutoff = 1e-13 * peak;

        // Signed frequency indices; the Nyquist index maps to both signs.
        let freqs = |m: usize, n: usize| -> Vec<(i64, f64)> {
            let n_i = n as i64;
            let m_i = m as i64;
            if n.is_multiple_of(2) && m_i == n_i / 2 && n > 1 {
                vec![(m_i, 0.5), (-m_i, 0.5)]
            } else if m_i > n_i / 2 {
                vec![(m_i - n_i, 1.0)]
            } else {
                vec![(m_i, 1.0)]
            }
        };
        let mut lines = Vec::new();
        for iy in 0..ny {
            for ix in 0..nx {
                let c = data[iy * nx + ix] * norm;
                if c.norm() <= cutoff {
                    continue;
                }
                for &(mx, wx) in &freqs(ix, nx) {
                    for &(my, wy) in &freqs(iy, ny) {
                        let q = WaveVector::new(
                            2.0 * PI * mx as f64 / (nx as f64 * self.dx),
                            2.0 * PI * my as f64 / (ny as f64 * self.dy),
                        );
                        lines.push(SpectralLine {
                            q,
                            amplitude: c * (wx * wy),
                        });
                    }
                }
            }
        }
        lines
    }
}

/// One spectral line `c · exp(i q·r)` of a profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralLine {
    pub q: WaveVector,
    pub amplitude: Complex64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RoughnessProfile {
    modes: Vec<CosineMode>,
    grid: Option<HeightGrid>,
}

impl RoughnessProfile {
    /// `a cos(2π x / λ)`.
    pub fn sinusoid(amplitude: f64, wavelength: f64) -> Result<Self> {
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::domain(format!("wavelength must be positive, got {wavelength}")));
        }
        let mode = CosineMode::new(amplitude, WaveVector::along_x(2.0 * PI / wavelength), 0.0)?;
        Ok(Self::from_modes(vec![mode]))
    }

    pub fn from_modes(modes: Vec<CosineMode>) -> Self {
        Self { modes, grid: None }
    }

    pub fn from_grid(grid: HeightGrid) -> Self {
        Self {
            modes: Vec::new(),
            grid: Some(grid),
        }
    }

    pub fn with_mode(mut self, mode: CosineMode) -> Self {
        self.modes.push(mode);
        self
    }

    pub fn modes(&self) -> &[CosineMode] {
        &self.modes
    }

    pub fn grid(&self) -> Option<&HeightGrid> {
        self.grid.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty() && self.grid.is_none()
    }

    /// Upper bound on `|h|`: the summed mode amplitudes plus the grid maximum.
    pub fn max_height(&self) -> f64 {
        self.modes.iter().map(|m| m.amplitude).sum::<f64>() + self.grid.as_ref().map_or(0.0, HeightGrid::max_abs)
    }

    /// `h(x, y)`; grids are interpolated bilinearly and reject points outside
    /// the sampled rectangle.
    pub fn evaluate(&self, x: f64, y: f64) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptyProfile);
        }
        let grid = match &self.grid {
            Some(g) => g.interpolate(x, y)?,
            None => 0.0,
        };
        Ok(self.modes.iter().map(|m| m.eval((x, y))).sum::<f64>() + grid)
    }

    /// `h(x, y)` with the grid extended periodically.
    pub fn evaluate_periodic(&self, x: f64, y: f64) -> f64 {
        let grid = self.grid.as_ref().map_or(0.0, |g| g.interpolate_periodic(x, y));
        self.modes.iter().map(|m| m.eval((x, y))).sum::<f64>() + grid
    }

    /// Spectral lines of the profile. Each cosine mode contributes
    /// `(a/2) e^{+iφ}` at `+q` and `(a/2) e^{−iφ}` at `−q` (a single line
    /// of amplitude `a cos φ` when `q = 0`).
    pub fn fourier_modes(&self) -> Result<Vec<SpectralLine>> {
        if self.is_empty() {
            return Err(Error::EmptyProfile);
        }
        let mut lines = Vec::with_capacity(2 * self.modes.len());
        for m in &self.modes {
            if m.wavevector.norm() == 0.0 {
                lines.push(SpectralLine {
                    q: m.wavevector,
                    amplitude: Complex64::new(m.amplitude * m.phase.cos(), 0.0),
                });
                continue;
            }
            let half = 0.5 * m.amplitude;
            lines.push(SpectralLine {
                q: m.wavevector,
                amplitude: Complex64::from_polar(half, m.phase),
            });
            lines.push(SpectralLine {
                q: -m.wavevector,
                amplitude: Complex64::from_polar(half, -m.phase),
            });
        }
        if let Some(g) = &self.grid {
            lines.extend(g.spectral_lines());
        }
        Ok(lines)
    }
}

/// `Re Σ c exp(i q·r)` over a set of spectral lines.
pub fn synthesize(lines: &[SpectralLine], r: (f64, f64)) -> f64 {
    lines
        .iter()
        .map(|l| (l.amplitude * Complex64::from_polar(1.0, l.q.dot(r))).re)
        .sum()
}
