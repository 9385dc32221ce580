//! C ABI over `robinlab`.
//!
//! Every fallible function returns a [`RobinStatus`] and writes its result
//! through an out-pointer. On failure the message is kept per thread and can
//! be read with [`robinlab_last_error`]. Meshes cross the boundary as opaque
//! [`RobinMesh`] handles owned by the caller and released with
//! [`robinlab_mesh_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use robinlab::fem2d::{self, Mesh2D};
use robinlab::profile::Verdict;
use robinlab::radial::{self, Sector};
use robinlab::shapes;
use robinlab::spaceform::{self, BallSpec, Curvature};
use robinlab::verify;
use robinlab::Error;

/// Status codes. `ROBIN_STATUS_OK` is zero; everything else is a failure.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RobinStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Parameter outside the supported range (bad κ, n, radius, α > 0, ...).
    InvalidArgument = 2,
    /// Root bracketing, integration or an eigen solver failed.
    Numerical = 3,
    /// Mesh construction or validation failed.
    Mesh = 4,
    /// File could not be read, written or parsed.
    Io = 5,
    /// Caller buffer is too small.
    BufferTooSmall = 6,
    /// Internal panic caught at the boundary.
    Internal = 7,
}

/// Opaque triangulated domain in the conformal disk model.
pub struct RobinMesh {
    inner: Mesh2D,
}

/// Summary of the chain `λ₂(Ω) ≤ Q_rayleigh ≤ Q_potential ≤ Q_ball = λ₂(Ω*)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RobinChain {
    pub volume: f64,
    pub radius_star: f64,
    pub sigma1_star: f64,
    pub lambda2_omega: f64,
    pub rayleigh_bound: f64,
    pub potential_bound: f64,
    pub ball_bound: f64,
    pub lambda2_ball: f64,
    pub slack: f64,
    pub mesh_error_bound: f64,
    pub center_x: f64,
    pub center_y: f64,
    /// 0 pass, 1 fail, 2 hypotheses not met.
    pub verdict: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> RobinStatus {
    match e {
        Error::Domain(_) | Error::Unsupported(_) | Error::UnreachableVolume { .. } => RobinStatus::InvalidArgument,
        Error::Integration { .. }
        | Error::BracketNotFound { .. }
        | Error::RootNotBracketed { .. }
        | Error::ZeroDenominator
        | Error::NonConvergence { .. }
        | Error::NotPositiveDefinite { .. } => RobinStatus::Numerical,
        Error::DegenerateTriangle { .. } | Error::InvalidMesh(_) | Error::SelfIntersection(_) => RobinStatus::Mesh,
        Error::Parse(_) | Error::Io(_) => RobinStatus::Io,
    }
}

fn fail(status: RobinStatus, msg: &str) -> RobinStatus {
    set_error(msg);
    status
}

/// Runs `f`, stores any error message and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), (RobinStatus, String)>) -> RobinStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RobinStatus::Ok
        }
        Ok(Err((s, msg))) => fail(s, &msg),
        Err(_) => fail(RobinStatus::Internal, "panic inside robinlab"),
    }
}

fn lift<T>(r: robinlab::Result<T>) -> Result<T, (RobinStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (RobinStatus, String) {
    (RobinStatus::NullPointer, "null pointer argument".into())
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), (RobinStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

unsafe fn mesh_ref<'a>(m: *const RobinMesh) -> Result<&'a Mesh2D, (RobinStatus, String)> {
    m.as_ref().map(|m| &m.inner).ok_or_else(null)
}

unsafe fn path_str<'a>(p: *const c_char) -> Result<&'a str, (RobinStatus, String)> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|_| (RobinStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

unsafe fn emit_mesh(r: robinlab::Result<Mesh2D>, out: *mut *mut RobinMesh) -> Result<(), (RobinStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    let m = lift(r)?;
    out.write(Box::into_raw(Box::new(RobinMesh { inner: m })));
    Ok(())
}

fn sector(l: u32) -> Result<Sector, (RobinStatus, String)> {
    lift(Sector::from_index(l))
}

/// Message for the last failure on this thread, or an empty string.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn robinlab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn robinlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `sn_κ(t)`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn robinlab_sn(kappa: f64, t: f64, out: *mut f64) -> RobinStatus {
    guard(|| {
        let c = lift(Curvature::new(kappa))?;
        write(out, lift(spaceform::sn(c, t))?)
    })
}

/// `sn_κ'(t)`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn robinlab_sn_prime(kappa: f64, t: f64, out: *mut f64) -> RobinStatus {
    guard(|| {
        let c = lift(Curvature::new(kappa))?;
        write(out, lift(spaceform::sn_prime(c, t))?)
    })
}

/// Volume of the geodesic ball of radius `radius` in the `dim`-dimensional
/// space form of curvature `kappa`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn robinlab_ball_volume(kappa: f64, dim: u32, radius: f64, out: *mut f64) -> RobinStatus {
    guard(|| {
        let b = lift(BallSpec::new(kappa, dim as usize, radius))?;
        write(out, spaceform::ball_volume(&b))
    })
}

/// Radius of the geodesic ball with the given volume.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn robinlab_radius_for_volume(kappa: f64, dim: u32, volume: f64, out: *mut f64) -> RobinStatus {
    guard(|| {
        let c = lift(Curvature::new(kappa))?;
        write(out, lift(spaceform::radius_for_volume(c, dim as usize, volume))?)
    })
}

/// First Robin eigenvalue of the geodesic ball in angular sector `l`
/// (0 radial, 1 dipole). Sector 1 gives `λ₂`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn robinlab_ball_robin_eigenvalue(
    kappa: f64,
    dim: u32,
    radius: f64,
    alpha: f64,
    l: u32,
    out: *mut f64,
) -> RobinStatus {
    guard(|| {
        let b = lift(BallSpec::new(kappa, dim as usize, radius))?;
        let s = sector(l)?;
        write(out, lift(radial::robin_eigenvalue_ball(&b, alpha, s))?)
    })
}

/// First nonzero Steklov eigenvalue of the geodesic ball.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn robinlab_ball_steklov(kappa: f64, dim: u32, radius: f64, out: *mut f64) -> RobinStatus {
    guard(|| {
        let b = lift(BallSpec::new(kappa, dim as usize, radius))?;
        write(out, lift(radial::steklov_ball(&b))?)
    })
}

/// Geodesic disk of radius `radius` centered at the origin, target edge `h`.
///
/// # Safety
/// `out` must be null or valid for writes. The handle must be released with
/// [`robinlab_mesh_free`].
#[no_mangle]
pub unsafe extern "C" fn robinlab_mesh_disk(kappa: f64, radius: f64, h: f64, out: *mut *mut RobinMesh) -> RobinStatus {
    guard(|| emit_mesh(shapes::disk_mesh(kappa, radius, h), out))
}

/// Ellipse with semi-axes `a`, `b` in disk-model coordinates.
///
/// # Safety
/// As for [`robinlab_mesh_disk`].
#[no_mangle]
pub unsafe extern "C" fn robinlab_mesh_ellipse(
    kappa: f64,
    a: f64,
    b: f64,
    h: f64,
    out: *mut *mut RobinMesh,
) -> RobinStatus {
    guard(|| emit_mesh(shapes::ellipse_mesh(kappa, a, b, h), out))
}

/// Axis-aligned `w × l` rectangle centered at the origin.
///
/// # Safety
/// As for [`robinlab_mesh_disk`].
#[no_mangle]
pub unsafe extern "C" fn robinlab_mesh_rectangle(
    kappa: f64,
    w: f64,
    l: f64,
    h: f64,
    out: *mut *mut RobinMesh,
) -> RobinStatus {
    guard(|| emit_mesh(shapes::rectangle_mesh(kappa, w, l, h), out))
}

/// Star-shaped domain with boundary radius `radius (1 + eps cos kθ)`.
///
/// # Safety
/// As for [`robinlab_mesh_disk`].
#[no_mangle]
pub unsafe extern "C" fn robinlab_mesh_perturbed_disk(
    kappa: f64,
    radius: f64,
    eps: f64,
    k: u32,
    h: f64,
    out: *mut *mut RobinMesh,
) -> RobinStatus {
    guard(|| emit_mesh(shapes::perturbed_disk_mesh(kappa, radius, eps, k, h), out))
}

/// Reads a mesh in the text format written by [`robinlab_mesh_write`].
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` as for [`robinlab_mesh_disk`].
#[no_mangle]
pub unsafe extern "C" fn robinlab_mesh_read(path: *const c_char, out: *mut *mut RobinMesh) -> RobinStatus {
    guard(|| {
        let p = path_str(path)?;
        emit_mesh(Mesh2D::read_file(p), out)
    })
}

/// # Safety
/// `mesh` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn robinlab_mesh_write(mesh: *const RobinMesh, path: *const c_char) -> RobinStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        lift(m.write_file(path_str(path)?))
    })
}

/// One uniform red refinement into a new handle.
///
/// # Safety
/// `mesh` must be a live handle; `out` as for [`robinlab_mesh_disk`].
#[no_mangle]
pub unsafe extern "C" fn robinlab_mesh_refine(mesh: *const RobinMesh, out: *mut *mut RobinMesh) -> RobinStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        emit_mesh(fem2d::refine(m), out)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `mesh` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn robinlab_mesh_free(mesh: *mut RobinMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Vertex and triangle counts.
///
/// # Safety
/// `mesh` must be a live handle; the out-pointers null or writable.
#[no_mangle]
pub unsafe extern "C" fn robinlab_mesh_size(
    mesh: *const RobinMesh,
    vertices: *mut usize,
    triangles: *mut usize,
) -> RobinStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        write(vertices, m.num_vertices())?;
        write(triangles, m.triangles().len())
    })
}

/// Metric area of the meshed domain.
///
/// # Safety
/// `mesh` must be a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn robinlab_mesh_volume(mesh: *const RobinMesh, out: *mut f64) -> RobinStatus {
    guard(|| write(out, fem2d::domain_volume(mesh_ref(mesh)?)))
}

unsafe fn write_values(values: &[f64], out: *mut f64, cap: usize) -> Result<(), (RobinStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    if cap < values.len() {
        return Err((RobinStatus::BufferTooSmall, format!("need {} slots, got {cap}", values.len())));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

/// Smallest `k` Robin eigenvalues of the meshed domain, ascending, written
/// to `out[0..k]`.
///
/// # Safety
/// `mesh` must be a live handle; `out` must hold `k` doubles.
#[no_mangle]
pub unsafe extern "C" fn robinlab_fem_robin(mesh: *const RobinMesh, alpha: f64, k: usize, out: *mut f64) -> RobinStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        let r = lift(fem2d::robin_eigs_fem(m, alpha, k))?;
        write_values(&r.eigenvalues, out, k)
    })
}

/// Smallest `k` nonzero Steklov eigenvalues, ascending.
///
/// # Safety
/// `mesh` must be a live handle; `out` must hold `k` doubles.
#[no_mangle]
pub unsafe extern "C" fn robinlab_fem_steklov(mesh: *const RobinMesh, k: usize, out: *mut f64) -> RobinStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        let r = lift(fem2d::steklov_fem(m, k))?;
        write_values(&r.eigenvalues, out, k)
    })
}

/// Evaluates the comparison chain on the meshed domain.
///
/// # Safety
/// `mesh` must be a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn robinlab_chain(mesh: *const RobinMesh, alpha: f64, out: *mut RobinChain) -> RobinStatus {
    guard(|| {
        let m = mesh_ref(mesh)?;
        let r = lift(verify::inequality_chain(m, alpha))?;
        write(
            out,
            RobinChain {
                volume: r.volume,
                radius_star: r.radius_star,
                sigma1_star: r.sigma1_star,
                lambda2_omega: r.lambda2_omega,
                rayleigh_bound: r.rayleigh_bound,
                potential_bound: r.potential_bound,
                ball_bound: r.ball_bound,
                lambda2_ball: r.lambda2_ball,
                slack: r.slack,
                mesh_error_bound: r.mesh_error_bound,
                center_x: r.center[0],
                center_y: r.center[1],
                verdict: match r.verdict {
                    Verdict::Pass => 0,
                    Verdict::Fail => 1,
                    Verdict::NotApplicable => 2,
                },
            },
        )
    })
}
