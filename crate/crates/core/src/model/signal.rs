use std::ops::Deref;

use nalgebra::DVector;

use crate::error::{Error, Result};

/// A real-valued signal of length at least two with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalVector(DVector<f64>);

impl SignalVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(values))
    }

    pub fn from_vector(values: DVector<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidDimension(format!(
                "signal length must be at least 2, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("signal"));
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_vector(DVector::zeros(n))
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }
}

impl Deref for SignalVector {
    type Target = DVector<f64>;

    fn deref(&self) -> &DVector<f64> {
        &self.0
    }
}

impl From<SignalVector> for Vec<f64> {
    fn from(s: SignalVector) -> Self {
        s.0.data.into()
    }
}
