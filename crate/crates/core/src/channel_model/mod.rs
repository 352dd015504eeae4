//! Channel physics: Fresnel geometry, the Ricean-K sensing model and CSI synthesis.

mod fresnel;
mod k_estimate;
mod ricean;
mod synth;

pub use fresnel::{fresnel_boundary_point, FresnelGeometry, Point2};
pub use k_estimate::{estimate_k_from_samples, estimate_ricean_k, K_MAX, K_MIN_SAMPLES};
pub use ricean::{
    amplitude_fluctuation, d_fluctuation_dk, d_fluctuation_drho, k_stationary, model_sweep,
    rho_stationary, sensing_ability, ModelCurvePoint, RiceanChannelParams,
};
pub use synth::{
    link_theta, ricean_samples, ricean_trace, synthesize_trace, MotionEvent, SimScenario,
    VitalTone, WALK_CLAMP_WAVELENGTHS,
};
