//! Integer-side objects: divisor counts, prime counts, Fermat rationals and
//! the prime-counting representation of ζ on the real axis.

pub mod divisors;
pub mod euler;
pub mod fermat;
pub mod primes;

pub use divisors::{
    delta_error, delta_scan, divisor_summatory, divisor_summatory_u64, sieve_divisors,
    DeltaScan, DivisorStream, DivisorTable,
};
pub use euler::{euler_pi_representation, euler_pi_representation_with, EulerReconstruction};
pub use fermat::{fermat_rational, fermat_scan, FermatRational, FermatScan, FermatSummary};
pub use primes::{prime_count, shared_sieve, PrimeSieve};
