use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Toroidal scalar trail field.
///
/// Deposits accumulate between ticks; each tick applies one
/// diffuse/decay step: every cell becomes `decay` times the 3x3 toroidal
/// mean of its neighborhood. The mean conserves total mass exactly, so
/// mass after `n` deposit-free steps is `T0 * decay^n` up to floating
/// rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct TrailField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldError {
    TooSmall { width: usize, height: usize },
    BadDecay,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::TooSmall { width, height } => {
                write!(f, "field must be at least 3x3 (got {width}x{height})")
            }
            FieldError::BadDecay => write!(f, "decay must lie in (0, 1]"),
        }
    }
}

impl core::error::Error for FieldError {}

impl TrailField {
    pub fn new(width: usize, height: usize) -> Result<Self, FieldError> {
        if width < 3 || height < 3 {
            return Err(FieldError::TooSmall { width, height });
        }
        Ok(Self {
            width,
            height,
            values: vec![0.0; width * height],
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.values[y * self.width + x] = v;
    }

    #[inline]
    pub fn add(&mut self, x: usize, y: usize, v: f64) {
        self.values[y * self.width + x] += v;
    }

    /// Wrap continuous coordinates into the torus and return the cell
    /// index under them.
    #[inline]
    pub fn cell_of(&self, x: f64, y: f64) -> (usize, usize) {
        let cx = wrap_coord(x, self.width as f64) as usize;
        let cy = wrap_coord(y, self.height as f64) as usize;
        (cx.min(self.width - 1), cy.min(self.height - 1))
    }

    /// Field value at the cell under continuous toroidal coordinates.
    #[inline]
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let (cx, cy) = self.cell_of(x, y);
        self.values[cy * self.width + cx]
    }

    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Add `counts[i] * amount` to every cell. Deposit counts are
    /// integers so worker-partitioned accumulation merges exactly.
    pub fn apply_deposit_counts(&mut self, counts: &[u32], amount: f64) {
        debug_assert_eq!(counts.len(), self.values.len());
        for (v, &c) in self.values.iter_mut().zip(counts) {
            if c > 0 {
                *v += c as f64 * amount;
            }
        }
    }

    /// One full diffuse/decay step, sequential. `scratch` is reused
    /// between calls and resized as needed.
    pub fn diffuse_decay(&mut self, decay: f64, scratch: &mut Vec<f64>) {
        scratch.resize(self.values.len(), 0.0);
        for y in 0..self.height {
            let row = y * self.width;
            horizontal_mean_row(&self.values, self.width, y, &mut scratch[row..row + self.width]);
        }
        let snapshot = core::mem::take(&mut self.values);
        let mut out = snapshot;
        for y in 0..self.height {
            let row = y * self.width;
            vertical_mean_decay_row(
                scratch,
                self.width,
                self.height,
                y,
                decay,
                &mut out[row..row + self.width],
            );
        }
        self.values = out;
    }
}

#[inline]
pub fn wrap_coord(v: f64, extent: f64) -> f64 {
    let w = v - libm::floor(v / extent) * extent;
    if w >= extent {
        0.0
    } else {
        w
    }
}

/// Horizontal toroidal 3-mean of row `y` of `src` into `out`.
///
/// The 3x3 toroidal mean is separable; this is the row pass. Exposed as a
/// per-row kernel so the engine can fan rows out across workers while
/// producing bit-identical results to the sequential path.
#[inline]
pub fn horizontal_mean_row(src: &[f64], width: usize, y: usize, out: &mut [f64]) {
    let row = &src[y * width..(y + 1) * width];
    let w = width;
    out[0] = (row[w - 1] + row[0] + row[1]) / 3.0;
    for x in 1..w - 1 {
        out[x] = (row[x - 1] + row[x] + row[x + 1]) / 3.0;
    }
    out[w - 1] = (row[w - 2] + row[w - 1] + row[0]) / 3.0;
}

/// Vertical toroidal 3-mean of the row-blurred buffer, times decay, into
/// the output row. Column pass of the separable 3x3 mean.
#[inline]
pub fn vertical_mean_decay_row(
    blurred: &[f64],
    width: usize,
    height: usize,
    y: usize,
    decay: f64,
    out: &mut [f64],
) {
    let up = ((y + height - 1) % height) * width;
    let mid = y * width;
    let down = ((y + 1) % height) * width;
    let k = decay / 3.0;
    for x in 0..width {
        out[x] = (blurred[up + x] + blurred[mid + x] + blurred[down + x]) * k;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_stays_zero() {
        let mut f = TrailField::new(8, 8).unwrap();
        let mut scratch = Vec::new();
        f.diffuse_decay(0.9, &mut scratch);
        assert!(f.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn impulse_spreads_to_nine_cells() {
        let mut f = TrailField::new(9, 9).unwrap();
        f.set(4, 4, 27.0);
        let mut scratch = Vec::new();
        f.diffuse_decay(0.9, &mut scratch);
        let expect = 0.9 * 27.0 / 9.0;
        for y in 0..9 {
            for x in 0..9 {
                let v = f.at(x, y);
                if (3..=5).contains(&x) && (3..=5).contains(&y) {
                    assert!((v - expect).abs() < 1e-12, "({x},{y}) {v}");
                } else {
                    assert_eq!(v, 0.0, "({x},{y})");
                }
            }
        }
    }

    #[test]
    fn impulse_wraps_on_torus() {
        let mut f = TrailField::new(5, 5).unwrap();
        f.set(0, 0, 9.0);
        let mut scratch = Vec::new();
        f.diffuse_decay(1.0, &mut scratch);
        // Corner impulse spreads to the wrapped 3x3 block.
        assert!((f.at(4, 4) - 1.0).abs() < 1e-12);
        assert!((f.at(1, 1) - 1.0).abs() < 1e-12);
        assert!((f.at(2, 2) - 0.0).abs() < 1e-12);
    }

    #[test]
    fn mass_follows_closed_form() {
        let mut f = TrailField::new(32, 24).unwrap();
        let mut rng = crate::rng::CounterRng::new(3, 0, 0, 0);
        for y in 0..24 {
            for x in 0..32 {
                f.set(x, y, rng.range_f64(0.0, 10.0));
            }
        }
        let t0 = f.total_mass();
        let mut scratch = Vec::new();
        for _ in 0..100 {
            f.diffuse_decay(0.9, &mut scratch);
        }
        let expect = t0 * libm::pow(0.9, 100.0);
        let rel = (f.total_mass() - expect).abs() / expect;
        assert!(rel < 1e-6, "relative error {rel}");
    }

    #[test]
    fn sample_wraps_negative_coords() {
        let mut f = TrailField::new(4, 4).unwrap();
        f.set(3, 3, 5.0);
        assert_eq!(f.sample(-1.0, -1.0), 5.0);
        assert_eq!(f.sample(3.0, 3.0), 5.0);
        assert_eq!(f.sample(7.2, 7.9), 5.0);
    }

    #[test]
    fn deposit_counts_accumulate() {
        let mut f = TrailField::new(3, 3).unwrap();
        let mut counts = vec![0u32; 9];
        counts[4] = 3;
        f.apply_deposit_counts(&counts, 2.0);
        assert_eq!(f.at(1, 1), 6.0);
    }

    #[test]
    fn too_small_rejected() {
        assert!(TrailField::new(2, 8).is_err());
        assert!(TrailField::new(8, 2).is_err());
    }
}
