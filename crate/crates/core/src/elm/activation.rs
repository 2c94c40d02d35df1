use nalgebra::DMatrix;

/// Hidden-node activation function `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ActivationKind {
    #[default]
    Sigmoid,
}

impl ActivationKind {
    #[inline]
    pub fn apply(self, u: f64) -> f64 {
        match self {
            ActivationKind::Sigmoid => 1.0 / (1.0 + (-u).exp()),
        }
    }

    /// Inverse of [`apply`](Self::apply) on the open codomain.
    #[inline]
    pub fn inverse(self, y: f64) -> f64 {
        match self {
            ActivationKind::Sigmoid => (y / (1.0 - y)).ln(),
        }
    }

    pub fn apply_matrix(self, m: &DMatrix<f64>) -> DMatrix<f64> {
        m.map(|u| self.apply(u))
    }

    pub fn apply_in_place(self, m: &mut DMatrix<f64>) {
        m.apply(|u| *u = self.apply(*u));
    }

    /// Stable on-disk tag.
    pub fn tag(self) -> u8 {
        match self {
            ActivationKind::Sigmoid => 0,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(ActivationKind::Sigmoid),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ActivationKind::Sigmoid => "sigmoid",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_values() {
        let g = ActivationKind::Sigmoid;
        assert_eq!(g.apply(0.0), 0.5);
        assert!((g.apply(50.0) - 1.0).abs() <= 1e-15);
        // 1 / (1 + e^{-ln 3}) = 1 / (1 + 1/3)
        assert!((g.apply(3f64.ln()) - 0.75).abs() < 1e-15);
        assert_eq!(g.apply(-1000.0), 0.0);
        assert_eq!(g.apply(1000.0), 1.0);
    }

    #[test]
    fn sigmoid_is_monotone_and_bounded() {
        let g = ActivationKind::Sigmoid;
        let mut prev = g.apply(-30.0);
        for k in -299..=300 {
            let y = g.apply(k as f64 / 10.0);
            assert!(y > 0.0 && y < 1.0);
            assert!(y > prev);
            prev = y;
        }
    }

    #[test]
    fn inverse_round_trips() {
        let g = ActivationKind::Sigmoid;
        for y in [1e-6, 0.1, 0.5, 0.9, 1.0 - 1e-6] {
            assert!((g.apply(g.inverse(y)) - y).abs() < 1e-12);
        }
    }
}
