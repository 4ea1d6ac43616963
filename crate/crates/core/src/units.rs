//! dB / dBm conversions. Everything inside the crate is linear (powers in mW).

use crate::Real;

#[inline]
pub fn db_to_lin<T: Real>(db: T) -> T {
    T::c(10.0).powf(db / T::c(10.0))
}

#[inline]
pub fn lin_to_db<T: Real>(lin: T) -> T {
    T::c(10.0) * lin.log10()
}

/// dBm to mW.
#[inline]
pub fn dbm_to_mw<T: Real>(dbm: T) -> T {
    db_to_lin(dbm)
}

#[inline]
pub fn mw_to_dbm<T: Real>(mw: T) -> T {
    lin_to_db(mw)
}
