//! Uniform 1-D finite-volume mesh and boundary rules.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    pub a: f64,
    pub b: f64,
    pub n_cells: usize,
    pub dx: f64,
}

impl Mesh {
    pub fn new(a: f64, b: f64, n_cells: usize) -> Self {
        assert!(b > a && n_cells > 0);
        Self {
            a,
            b,
            n_cells,
            dx: (b - a) / n_cells as f64,
        }
    }

    /// Mesh with the requested cell width (rounded to a whole cell count).
    pub fn with_dx(a: f64, b: f64, dx: f64) -> Self {
        let n = ((b - a) / dx).round().max(1.0) as usize;
        Self::new(a, b, n)
    }

    pub fn center(&self, c: usize) -> f64 {
        self.a + (c as f64 + 0.5) * self.dx
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|c| self.center(c)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Zero-order extrapolation.
    #[default]
    Outflow,
    Periodic,
}

impl Boundary {
    /// Index of the ghost neighbor to the left of cell 0.
    pub fn left_ghost(&self, n_cells: usize) -> usize {
        match self {
            Boundary::Outflow => 0,
            Boundary::Periodic => n_cells - 1,
        }
    }

    /// Index of the ghost neighbor to the right of the last cell.
    pub fn right_ghost(&self, n_cells: usize) -> usize {
        match self {
            Boundary::Outflow => n_cells - 1,
            Boundary::Periodic => 0,
        }
    }
}
