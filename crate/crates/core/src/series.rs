// SPDX-License-Identifier: MIT OR Apache-2.0

use std::ops::Deref;

use crate::error::{CpdError, Result};

/// A finite, non-empty, real-valued sequence.
///
/// Negative zero is normalized to positive zero on construction so that
/// value equality and bit equality agree.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_values(&values)?;
        let values = values
            .into_iter()
            .map(|v| if v == 0.0 { 0.0 } else { v })
            .collect();
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Concatenates several series in order.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a TimeSeries>) -> Result<Self> {
        let values: Vec<f64> = parts
            .into_iter()
            .flat_map(|p| p.values.iter().copied())
            .collect();
        Self::new(values)
    }
}

impl Deref for TimeSeries {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

impl TryFrom<Vec<f64>> for TimeSeries {
    type Error = CpdError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

pub(crate) fn check_values(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(CpdError::EmptySeries);
    }
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(CpdError::NonFinite { index, value });
    }
    Ok(())
}
