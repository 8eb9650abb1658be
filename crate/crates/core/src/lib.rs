//! Exact two-electron entanglement production by a double-delta scatterer in
//! a two-channel quantum wire.
//!
//! * [`chanmath`]: 2×2 complex algebra, channel kinematics, unit conversion.
//! * [`scattering`]: single/double delta S-matrices and their composition.
//! * [`entangle`]: post-selected state, concurrence, reduced density matrix.
//! * [`resonance`]: transmission resonances and concurrence zeros.
//! * [`oracle`]: finite-difference cross-check of the scattering amplitudes.

pub mod chanmath;
pub mod entangle;
pub mod error;
pub mod oracle;
pub mod resonance;
pub mod scattering;

pub use chanmath::{Mat2C, C64};
pub use entangle::{EntanglementReport, GammaState, WMatrix};
pub use error::{Error, Result};
pub use resonance::{Resonance, ResonanceTable};
pub use scattering::{AmplitudePair, DeltaChain, ScattererS};

/// Resonances of channel `channel` of `chain` over `[k_lo, k_hi]` (`2π/d` units).
pub fn resonance_table(
    chain: &DeltaChain,
    channel: u32,
    k_lo: f64,
    k_hi: f64,
    tol: f64,
) -> Result<ResonanceTable> {
    let u = match channel {
        1 => chain.u11,
        2 => chain.u22,
        _ => {
            return Err(Error::InvalidInput(format!(
                "channel must be 1 or 2, got {channel}"
            )))
        }
    };
    Ok(ResonanceTable {
        channel,
        entries: resonance::find_resonances(u, DeltaChain::D, k_lo, k_hi, tol)?,
    })
}
