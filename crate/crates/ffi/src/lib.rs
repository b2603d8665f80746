//! C ABI over `sipkit`.
//!
//! Every fallible function returns a [`SipkitStatus`]; results go through
//! out-pointers. Objects are opaque handles released with their `_free`
//! function. Strings returned to the caller are released with
//! [`sipkit_string_free`]. The message for the last failure on the calling
//! thread is available from [`sipkit_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_bigint::BigInt;
use sipkit::expansion;
use sipkit::families::{self, Family, Subset};
use sipkit::ipsets::{self, IntSet, IpSetError};
use sipkit::rotation::{self, Angle, ArcSet, RotationConfig};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SipkitStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Budget = 4,
    Horizon = 5,
    Panic = 6,
}

/// Sign type of a nonzero integer.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SipkitSignType {
    Positive = 0,
    Negative = 1,
}

/// Exhaustive classification of a family.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SipkitClassification {
    pub proper: bool,
    pub filter: bool,
    pub ramsey: bool,
    pub dual_is_filter: bool,
}

/// Opaque finite set of integers.
pub struct SipkitIntSet(IntSet);

/// Opaque upward-closed family on `[1..u]`.
pub struct SipkitFamily(Family);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("no interior nul"));
}

struct Fail(SipkitStatus, String);

impl From<IpSetError> for Fail {
    fn from(e: IpSetError) -> Self {
        let code = match e {
            IpSetError::BudgetExhausted { .. }
            | IpSetError::CapExceeded { .. }
            | IpSetError::PairBudgetExceeded { .. } => SipkitStatus::Budget,
            _ => SipkitStatus::Domain,
        };
        Fail(code, e.to_string())
    }
}

impl From<expansion::ExpansionError> for Fail {
    fn from(e: expansion::ExpansionError) -> Self {
        Fail(SipkitStatus::Domain, e.to_string())
    }
}

impl From<families::FamilyError> for Fail {
    fn from(e: families::FamilyError) -> Self {
        Fail(SipkitStatus::Domain, e.to_string())
    }
}

impl From<rotation::RotationError> for Fail {
    fn from(e: rotation::RotationError) -> Self {
        let code = match e {
            rotation::RotationError::HorizonExceeded { .. }
            | rotation::RotationError::HorizonExhausted { .. } => SipkitStatus::Horizon,
            rotation::RotationError::Parse { .. } | rotation::RotationError::InvalidAlpha(_) => {
                SipkitStatus::InvalidArgument
            }
            _ => SipkitStatus::Domain,
        };
        Fail(code, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(SipkitStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting failures and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SipkitStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SipkitStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            SipkitStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(SipkitStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn read_big(p: *const c_char, what: &str) -> Result<BigInt, Fail> {
    let s = read_str(p, what)?;
    s.trim()
        .parse()
        .map_err(|_| Fail(SipkitStatus::InvalidArgument, format!("{what}: not an integer: {s}")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

fn to_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// Message describing the most recent failure on this thread; empty after
/// a success. Valid until the next call into this library on the thread.
#[no_mangle]
pub extern "C" fn sipkit_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sipkit_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sipkit_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Sign-change count of the decimal integer `t ≥ 1`.
///
/// # Safety
/// `t` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sipkit_z_count(t: *const c_char, out: *mut u64) -> SipkitStatus {
    guard(|| {
        let t = read_big(t, "t")?;
        write_out(out, expansion::z_count(&t)?, "out")
    })
}

/// `z(t) mod modulus` for odd `modulus ≥ 3`.
///
/// # Safety
/// `t` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sipkit_color_class(
    t: *const c_char,
    modulus: u32,
    out: *mut u32,
) -> SipkitStatus {
    guard(|| {
        let t = read_big(t, "t")?;
        write_out(out, expansion::color_class(&t, modulus)?, "out")
    })
}

/// Sign type of the decimal integer `t ≠ 0`.
///
/// # Safety
/// `t` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sipkit_sign_type(t: *const c_char, out: *mut SipkitSignType) -> SipkitStatus {
    guard(|| {
        let t = read_big(t, "t")?;
        if t == BigInt::from(0) {
            return Err(Fail(SipkitStatus::Domain, "0 has no sign type".into()));
        }
        let ty = match expansion::sign_type(&t) {
            expansion::SignType::Positive => SipkitSignType::Positive,
            expansion::SignType::Negative => SipkitSignType::Negative,
        };
        write_out(out, ty, "out")
    })
}

/// Whether every ternary index of `t` exceeds every index of `s`.
///
/// # Safety
/// `t`, `s` must be nul-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sipkit_is_beyond(
    t: *const c_char,
    s: *const c_char,
    out: *mut bool,
) -> SipkitStatus {
    guard(|| {
        let (t, s) = (read_big(t, "t")?, read_big(s, "s")?);
        write_out(out, expansion::is_beyond(&t, &s)?, "out")
    })
}

/// Builds a set from `len` machine integers (duplicates are merged).
///
/// # Safety
/// `values` must point to `len` readable integers (or be null with `len == 0`);
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sipkit_intset_new(
    values: *const i64,
    len: usize,
    out: *mut *mut SipkitIntSet,
) -> SipkitStatus {
    guard(|| {
        let slice: &[i64] = if len == 0 {
            &[]
        } else if values.is_null() {
            return Err(null("values"));
        } else {
            std::slice::from_raw_parts(values, len)
        };
        let set = Box::new(SipkitIntSet(IntSet::from_i64s(slice)));
        write_out(out, Box::into_raw(set), "out")
    })
}

/// # Safety
/// `set` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sipkit_intset_free(set: *mut SipkitIntSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Number of elements.
///
/// # Safety
/// `set` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sipkit_intset_len(set: *const SipkitIntSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.len())
}

/// Element `index` (ascending order) as an `i64`; `Domain` if it does not fit.
///
/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sipkit_intset_get(
    set: *const SipkitIntSet,
    index: usize,
    out: *mut i64,
) -> SipkitStatus {
    guard(|| {
        let set = handle(set, "set")?;
        let v = set
            .0
            .elements()
            .get(index)
            .ok_or_else(|| Fail(SipkitStatus::InvalidArgument, format!("index {index} out of range")))?;
        let v = i64::try_from(v).map_err(|_| Fail(SipkitStatus::Domain, format!("{v} exceeds i64")))?;
        write_out(out, v, "out")
    })
}

/// The set as text, e.g. `{-3, 0, 3}`; free with [`sipkit_string_free`].
///
/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sipkit_intset_to_string(
    set: *const SipkitIntSet,
    out: *mut *mut c_char,
) -> SipkitStatus {
    guard(|| {
        let set = handle(set, "set")?;
        write_out(out, to_c_string(set.0.to_string()), "out")
    })
}

unsafe fn closure(
    set: *const SipkitIntSet,
    out: *mut *mut SipkitIntSet,
    f: fn(&IntSet) -> Result<IntSet, IpSetError>,
) -> SipkitStatus {
    guard(|| {
        let set = handle(set, "set")?;
        let result = f(&set.0)?;
        write_out(out, Box::into_raw(Box::new(SipkitIntSet(result))), "out")
    })
}

/// `D(A) = A − A`.
///
/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sipkit_difference_set(
    set: *const SipkitIntSet,
    out: *mut *mut SipkitIntSet,
) -> SipkitStatus {
    closure(set, out, ipsets::difference_set)
}

/// `IP(A)`: all finite subset sums, including the empty sum 0.
///
/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sipkit_ip_closure(
    set: *const SipkitIntSet,
    out: *mut *mut SipkitIntSet,
) -> SipkitStatus {
    closure(set, out, ipsets::ip_closure)
}

/// `SIP(A) = D(IP(A))`.
///
/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sipkit_sip_closure(
    set: *const SipkitIntSet,
    out: *mut *mut SipkitIntSet,
) -> SipkitStatus {
    closure(set, out, ipsets::sip_closure)
}

/// Whether `SIP(B) = IP(B ∪ −B)` for a nonempty set of positive integers.
///
/// # Safety
/// `set` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sipkit_verify_symmetrization(
    set: *const SipkitIntSet,
    out: *mut bool,
) -> SipkitStatus {
    guard(|| {
        let set = handle(set, "set")?;
        write_out(out, ipsets::verify_lemma11(&set.0)?.holds, "out")
    })
}

/// `N(x, U) ∩ [1..horizon]` for rotation number `alpha` (`p/q`), point `x`
/// and arc text such as `-1/8,1/8` or `[0,1/8)`.
///
/// # Safety
/// String arguments must be nul-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sipkit_hitting_set(
    alpha: *const c_char,
    x: *const c_char,
    arc: *const c_char,
    horizon: u64,
    out: *mut *mut SipkitIntSet,
) -> SipkitStatus {
    guard(|| {
        let alpha = rotation::parse_rational(read_str(alpha, "alpha")?)?;
        let cfg = RotationConfig::new(alpha, horizon)?;
        let x: Angle = read_str(x, "x")?.parse()?;
        let arc: ArcSet = read_str(arc, "arc")?.parse()?;
        let set = rotation::hitting_set(&x, &arc, &cfg);
        write_out(out, Box::into_raw(Box::new(SipkitIntSet(set))), "out")
    })
}

/// Upward closure of `len` generator bitmasks on `[1..universe]`
/// (bit `i` stands for element `i + 1`).
///
/// # Safety
/// `masks` must point to `len` readable values (or be null with `len == 0`);
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sipkit_family_new(
    universe: u32,
    masks: *const u32,
    len: usize,
    out: *mut *mut SipkitFamily,
) -> SipkitStatus {
    guard(|| {
        let slice: &[u32] = if len == 0 {
            &[]
        } else if masks.is_null() {
            return Err(null("masks"));
        } else {
            std::slice::from_raw_parts(masks, len)
        };
        let f = Family::generated(universe, slice.iter().map(|&m| Subset(m)))?;
        write_out(out, Box::into_raw(Box::new(SipkitFamily(f))), "out")
    })
}

/// # Safety
/// `family` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sipkit_family_free(family: *mut SipkitFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// Number of minimal members.
///
/// # Safety
/// `family` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sipkit_family_minimal_len(family: *const SipkitFamily) -> usize {
    family.as_ref().map_or(0, |f| f.0.minimal().len())
}

/// Minimal member `index` as a bitmask.
///
/// # Safety
/// `family` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sipkit_family_minimal_get(
    family: *const SipkitFamily,
    index: usize,
    out: *mut u32,
) -> SipkitStatus {
    guard(|| {
        let f = handle(family, "family")?;
        let m = f
            .0
            .minimal()
            .get(index)
            .ok_or_else(|| Fail(SipkitStatus::InvalidArgument, format!("index {index} out of range")))?;
        write_out(out, m.0, "out")
    })
}

/// Whether the subset `mask` belongs to the family.
///
/// # Safety
/// `family` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sipkit_family_contains(
    family: *const SipkitFamily,
    mask: u32,
    out: *mut bool,
) -> SipkitStatus {
    guard(|| {
        let f = handle(family, "family")?;
        write_out(out, f.0.contains(Subset(mask)), "out")
    })
}

/// Sets meeting every member.
///
/// # Safety
/// `family` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sipkit_family_dual(
    family: *const SipkitFamily,
    out: *mut *mut SipkitFamily,
) -> SipkitStatus {
    guard(|| {
        let f = handle(family, "family")?;
        write_out(out, Box::into_raw(Box::new(SipkitFamily(f.0.dual()))), "out")
    })
}

/// Upward closure of pairwise intersections.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sipkit_family_join(
    left: *const SipkitFamily,
    right: *const SipkitFamily,
    out: *mut *mut SipkitFamily,
) -> SipkitStatus {
    guard(|| {
        let (a, b) = (handle(left, "left")?, handle(right, "right")?);
        let j = a.0.join(&b.0)?;
        write_out(out, Box::into_raw(Box::new(SipkitFamily(j))), "out")
    })
}

/// Members whose intersection with every member stays in the family.
///
/// # Safety
/// `family` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sipkit_family_sharp_dual(
    family: *const SipkitFamily,
    cap: u32,
    out: *mut *mut SipkitFamily,
) -> SipkitStatus {
    guard(|| {
        let f = handle(family, "family")?;
        let s = f.0.sharp_dual(cap)?;
        write_out(out, Box::into_raw(Box::new(SipkitFamily(s))), "out")
    })
}

/// # Safety
/// `family` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sipkit_family_classify(
    family: *const SipkitFamily,
    cap: u32,
    out: *mut SipkitClassification,
) -> SipkitStatus {
    guard(|| {
        let f = handle(family, "family")?;
        let c = f.0.classify(cap)?;
        write_out(
            out,
            SipkitClassification {
                proper: c.proper,
                filter: c.filter,
                ramsey: c.ramsey,
                dual_is_filter: c.dual_is_filter,
            },
            "out",
        )
    })
}

/// Runs one CLI command (`argv` without the program name) and returns the
/// rendered report, or the usage text on exit code 64.
///
/// # Safety
/// `argv` must point to `argc` nul-terminated strings; `out_text` and
/// `out_exit` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sipkit_execute(
    argc: usize,
    argv: *const *const c_char,
    out_text: *mut *mut c_char,
    out_exit: *mut i32,
) -> SipkitStatus {
    guard(|| {
        let mut args = Vec::with_capacity(argc);
        if argc > 0 {
            if argv.is_null() {
                return Err(null("argv"));
            }
            for i in 0..argc {
                args.push(read_str(*argv.add(i), "argv element")?.to_string());
            }
        }
        if out_text.is_null() || out_exit.is_null() {
            return Err(null("out"));
        }
        let exec = sipkit::cli::execute(args);
        out_exit.write(exec.exit_code);
        out_text.write(to_c_string(exec.output));
        Ok(())
    })
}
