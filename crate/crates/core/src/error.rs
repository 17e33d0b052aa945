// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A computation produced a non-finite or divergent quantity.
    #[error("numerical failure in {quantity}: {detail}")]
    Numerical { quantity: String, detail: String },

    #[error("tabulated PSD: {0}")]
    Table(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(quantity: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Numerical {
            quantity: quantity.into(),
            detail: detail.into(),
        }
    }
}
