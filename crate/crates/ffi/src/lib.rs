//! C bindings for `commutant`.
//!
//! Every function returns a [`CommutantStatus`]; results are written through
//! out-pointers. Matrices cross the boundary as opaque [`CommutantMatrix`]
//! handles owned by the caller and released with [`commutant_matrix_free`].
//! After a non-OK status, [`commutant_last_error`] describes the failure on
//! the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use commutant::{Budget, Error, FieldCtx, MatF};
use num_rational::Ratio;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommutantStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Budget = 3,
    Singular = 4,
    Overflow = 5,
    Consistency = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// An unsigned 128-bit count split into halves.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CommutantU128 {
    pub lo: u64,
    pub hi: u64,
}

impl From<u128> for CommutantU128 {
    fn from(v: u128) -> Self {
        CommutantU128 { lo: v as u64, hi: (v >> 64) as u64 }
    }
}

impl CommutantU128 {
    pub fn get(self) -> u128 {
        (self.hi as u128) << 64 | self.lo as u128
    }
}

/// Square matrix over a prime field.
pub struct CommutantMatrix {
    inner: MatF,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CommutantStatus {
    match e {
        Error::Budget { .. } => CommutantStatus::Budget,
        Error::Singular => CommutantStatus::Singular,
        Error::Overflow(_) => CommutantStatus::Overflow,
        Error::Consistency(_) => CommutantStatus::Consistency,
        Error::Size(_) | Error::Mismatch(_) | Error::Contract(_) => CommutantStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), CommutantStatus>) -> CommutantStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CommutantStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            CommutantStatus::Panic
        }
    }
}

fn lib<T>(r: commutant::Result<T>) -> Result<T, CommutantStatus> {
    r.map_err(|e| {
        set_error(&e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), CommutantStatus> {
    if p.is_null() {
        set_error(&format!("{name} is null"));
        return Err(CommutantStatus::NullPointer);
    }
    Ok(())
}

fn budget_of(steps: u64) -> Budget {
    if steps == 0 {
        Budget::default()
    } else {
        Budget::new(steps)
    }
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn commutant_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn commutant_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Builds an `n×n` matrix over `F_p` from `n*n` row-major integers.
///
/// # Safety
/// `entries` must point to `n*n` readable values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn commutant_matrix_new(
    p: u32,
    n: usize,
    entries: *const i64,
    out: *mut *mut CommutantMatrix,
) -> CommutantStatus {
    guard(|| {
        non_null(entries, "entries")?;
        non_null(out, "out")?;
        let ctx = lib(FieldCtx::new(p as u64))?;
        let len = n.checked_mul(n).filter(|&l| l > 0).ok_or_else(|| {
            set_error("n must be positive");
            CommutantStatus::InvalidArgument
        })?;
        let values = std::slice::from_raw_parts(entries, len);
        let m = lib(MatF::square(ctx, values))?;
        *out = Box::into_raw(Box::new(CommutantMatrix { inner: m }));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `m` must come from `commutant_matrix_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn commutant_matrix_free(m: *mut CommutantMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Side length of the matrix.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn commutant_matrix_size(m: *const CommutantMatrix, out: *mut usize) -> CommutantStatus {
    guard(|| {
        non_null(m, "matrix")?;
        non_null(out, "out")?;
        *out = (*m).inner.n();
        Ok(())
    })
}

/// Entry `(i, j)` (zero-based) as a residue in `[0, p)`.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn commutant_matrix_get(
    m: *const CommutantMatrix,
    i: usize,
    j: usize,
    out: *mut u32,
) -> CommutantStatus {
    guard(|| {
        non_null(m, "matrix")?;
        non_null(out, "out")?;
        let inner = &(*m).inner;
        if i >= inner.n() || j >= inner.n() {
            set_error("index out of range");
            return Err(CommutantStatus::InvalidArgument);
        }
        *out = inner.get(i, j);
        Ok(())
    })
}

/// `#{(U,V) : UV - VU = M}`. A `budget` of 0 selects the default limit.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn commutant_fibre_count(
    m: *const CommutantMatrix,
    budget: u64,
    out: *mut CommutantU128,
) -> CommutantStatus {
    guard(|| {
        non_null(m, "matrix")?;
        non_null(out, "out")?;
        let r = lib(commutant::flatcheck::fibre_count(&(*m).inner, budget_of(budget)))?;
        *out = r.count.into();
        Ok(())
    })
}

/// `#{(U,V) : UV = VU}` in `M_n(F_p)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn commutant_commuting_count(
    n: usize,
    p: u32,
    budget: u64,
    out: *mut CommutantU128,
) -> CommutantStatus {
    guard(|| {
        non_null(out, "out")?;
        let r = lib(commutant::expsum::commuting_count(n, p, budget_of(budget)))?;
        *out = r.value().into();
        Ok(())
    })
}

/// `N(T)`: integer pairs with entries in `[-T, T]` that commute.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn commutant_count_n(
    n: usize,
    t: i64,
    budget: u64,
    out: *mut CommutantU128,
) -> CommutantStatus {
    guard(|| {
        non_null(out, "out")?;
        let c = lib(commutant::matz::count_n(n, t, budget_of(budget)))?;
        *out = c.into();
        Ok(())
    })
}

/// `S(A,B;p)` as the counts `c_0, ..., c_{p-1}` with `S = Σ c_k ζ_p^k` and
/// `c_0 = 0`, plus `|S|`. `counts` must hold `p` values.
///
/// # Safety
/// `a`, `b` must be live handles; `counts` must point to `counts_len`
/// writable values and `magnitude` must be writable.
#[no_mangle]
pub unsafe extern "C" fn commutant_exp_sum(
    a: *const CommutantMatrix,
    b: *const CommutantMatrix,
    budget: u64,
    counts: *mut i64,
    counts_len: usize,
    magnitude: *mut f64,
) -> CommutantStatus {
    guard(|| {
        non_null(a, "A")?;
        non_null(b, "B")?;
        non_null(counts, "counts")?;
        non_null(magnitude, "magnitude")?;
        let s = lib(commutant::expsum::exp_sum(&(*a).inner, &(*b).inner, budget_of(budget)))?;
        let values = s.normalized();
        if counts_len < values.len() {
            set_error(&format!("counts buffer holds {counts_len}, need {}", values.len()));
            return Err(CommutantStatus::BufferTooSmall);
        }
        std::slice::from_raw_parts_mut(counts, values.len()).copy_from_slice(&values);
        *magnitude = s.magnitude();
        Ok(())
    })
}

/// `D - L + L²/(N - D + L)` with `L = twice_l / 2`, as a reduced fraction.
///
/// # Safety
/// `numer` and `denom` must be writable.
#[no_mangle]
pub unsafe extern "C" fn commutant_exponent_general(
    big_n: i64,
    d: i64,
    twice_l: i64,
    numer: *mut i64,
    denom: *mut i64,
) -> CommutantStatus {
    guard(|| {
        non_null(numer, "numer")?;
        non_null(denom, "denom")?;
        let r = lib(commutant::harmonic::exponent_general(big_n, d, Ratio::new(twice_l, 2)))?;
        let e: Ratio<i64> = r.exponent.parse().map_err(|_| {
            set_error("exponent did not round-trip");
            CommutantStatus::Consistency
        })?;
        *numer = *e.numer();
        *denom = *e.denom();
        Ok(())
    })
}
