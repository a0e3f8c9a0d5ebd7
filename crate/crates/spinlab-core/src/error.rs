use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation precondition was violated.
    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    /// The resonance condition has no solution for this species.
    #[error("no resonance crossing: gamma_n = {gamma_n} Hz/T >= gamma_nv = {gamma_nv} Hz/T")]
    NoResonance { gamma_n: f64, gamma_nv: f64 },

    /// Unknown species name in the registry.
    #[error("unknown spin species `{0}`")]
    UnknownSpecies(String),
}

impl Error {
    pub fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}
