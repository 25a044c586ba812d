pub mod conic;
pub mod driver;
pub mod error;
pub mod linalg;
pub mod model;
pub mod rbf_sca;
pub mod rbf_sdr;
pub mod scenario;
pub mod txbf;
