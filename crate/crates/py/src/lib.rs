//! Python bindings. Structured results are returned as JSON strings; the
//! plain functions below the module do the work and are tested from Rust.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyNotImplementedError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use hermlab::brauer::BrauerClass;
use hermlab::fields::FieldDesc;
use hermlab::hermitian::{HermFormDesc, InvolutionDesc, UKind};
use hermlab::lab::{split_form, LabInput};
use hermlab::quadform::QuadForm;
use hermlab::uinv::derivation::fmt_rational;
use hermlab::uinv::{Assertions, BoundKind};
use hermlab::Error;

fn to_py(e: Error) -> PyErr {
    match &e {
        Error::Parse { .. } | Error::Invalid(_) | Error::FieldMismatch { .. } | Error::NotAnExtension(_) => {
            PyValueError::new_err(e.to_string())
        }
        e if e.is_declined() => PyNotImplementedError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json<T: serde::Serialize>(v: &T) -> hermlab::Result<String> {
    serde_json::to_string(v).map_err(|e| Error::Internal(e.to_string()))
}

pub fn involution(k: &FieldDesc, name: &str, lam: Option<&str>) -> hermlab::Result<InvolutionDesc> {
    match name {
        "canonical" | "symplectic" => Ok(InvolutionDesc::Symplectic),
        "orthogonal" => Ok(InvolutionDesc::Orthogonal),
        "unitary" => {
            let l = lam.ok_or_else(|| Error::Invalid("unitary involution needs lam".into()))?;
            InvolutionDesc::unitary(k, k.parse_class(l)?)
        }
        other => Err(Error::Invalid(format!("unknown involution {other:?}"))),
    }
}

pub fn quad_isotropic(field: &str, form: &str) -> hermlab::Result<bool> {
    let k = FieldDesc::parse(field)?;
    hermlab::quadform::qf_is_isotropic(&QuadForm::parse(&k, form)?)
}

pub fn herm_isotropic(field: &str, cls: &str, form: &str, eps: i8, inv: &str, lam: Option<&str>) -> hermlab::Result<bool> {
    let k = FieldDesc::parse(field)?;
    let b = BrauerClass::parse(&k, cls)?;
    let h = HermFormDesc::new(b, involution(&k, inv, lam)?, eps, QuadForm::parse(&k, form)?.entries)?;
    hermlab::hermitian::herm_is_isotropic(&h)
}

pub fn exact(field: &str, cls: &str, kind: &str, lam: Option<&str>, assert_division: &[String]) -> hermlab::Result<(u64, String)> {
    let k = FieldDesc::parse(field)?;
    let b = BrauerClass::parse(&k, cls)?;
    let kind: UKind = kind.parse()?;
    let l = lam.map(|l| k.parse_class(l)).transpose()?;
    let d = hermlab::uinv::u_exact(&b, kind, l.as_ref(), &Assertions::parse(assert_division)?)?;
    let v = d.value_u64().ok_or_else(|| Error::Internal(format!("non-integral value {}", d.value)))?;
    Ok((v, json(&d)?))
}

pub fn search(field: &str, cls: &str, inv: &str, eps: i8, lam: Option<&str>) -> hermlab::Result<usize> {
    let k = FieldDesc::parse(field)?;
    let b = BrauerClass::parse(&k, cls)?;
    hermlab::hermitian::u_search(&b, &involution(&k, inv, lam)?, eps, &k)
}

pub fn ai(i: u32, d: u64, second: bool) -> hermlab::Result<BTreeMap<String, String>> {
    let kind = if second { BoundKind::Second } else { BoundKind::First };
    let b = hermlab::uinv::bounds_ai(i, d, kind)?;
    Ok(b.kinds().into_iter().map(|k| (k.as_str().to_string(), fmt_rational(b.get(k).expect("listed")))).collect())
}

pub fn tensor(n: u32, uk: &str) -> hermlab::Result<BTreeMap<String, String>> {
    let uk = uk.trim().parse().map_err(|_| Error::Invalid(format!("not a rational: {uk:?}")))?;
    let t = hermlab::uinv::bounds_tensor(n, &uk)?;
    Ok(BTreeMap::from([
        ("plus".to_string(), fmt_rational(&t.plus)),
        ("minus".to_string(), fmt_rational(&t.minus)),
        ("zero".to_string(), fmt_rational(&t.zero)),
    ]))
}

pub fn lab(model: &str, p: u64, symbol: &str, sigma: &str, t: &str) -> hermlab::Result<LabInput> {
    LabInput::new(model.parse()?, p, symbol, sigma.parse()?, t)
}

#[pyfunction]
#[pyo3(signature = (field, form))]
fn is_isotropic(field: &str, form: &str) -> PyResult<bool> {
    quad_isotropic(field, form).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (field, cls, form, eps=1, involution="canonical", lam=None))]
fn herm_is_isotropic(field: &str, cls: &str, form: &str, eps: i8, involution: &str, lam: Option<&str>) -> PyResult<bool> {
    herm_isotropic(field, cls, form, eps, involution, lam).map_err(to_py)
}

#[pyfunction]
fn u_quadratic(field: &str) -> PyResult<usize> {
    FieldDesc::parse(field).and_then(|k| hermlab::quadform::u_quadratic(&k)).map_err(to_py)
}

/// Returns `(value, derivation_json)`.
#[pyfunction]
#[pyo3(signature = (field, cls, kind, lam=None, assert_division=Vec::new()))]
fn u_exact(field: &str, cls: &str, kind: &str, lam: Option<&str>, assert_division: Vec<String>) -> PyResult<(u64, String)> {
    exact(field, cls, kind, lam, &assert_division).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (field, cls, involution="canonical", eps=1, lam=None))]
fn u_search(field: &str, cls: &str, involution: &str, eps: i8, lam: Option<&str>) -> PyResult<usize> {
    search(field, cls, involution, eps, lam).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (i, d=2, second=false))]
fn bounds_ai(i: u32, d: u64, second: bool) -> PyResult<BTreeMap<String, String>> {
    ai(i, d, second).map_err(to_py)
}

#[pyfunction]
fn bounds_tensor(n: u32, uk: &str) -> PyResult<BTreeMap<String, String>> {
    tensor(n, uk).map_err(to_py)
}

/// Returns `(passed, failed, report_json)`.
#[pyfunction]
#[pyo3(signature = (p=5, only=None))]
fn verify_paper(p: u64, only: Option<&str>) -> PyResult<(usize, usize, String)> {
    let r = hermlab::verify::verify_paper(p, only).map_err(to_py)?;
    Ok((r.passed, r.failed, json(&r).map_err(to_py)?))
}

#[pyfunction]
#[pyo3(signature = (p=5, symbol="(2,5)", sigma="inti-gamma", t="j", model="padic"))]
fn lab_pid(p: u64, symbol: &str, sigma: &str, t: &str, model: &str) -> PyResult<String> {
    lab(model, p, symbol, sigma, t).and_then(|i| i.pid_report()).and_then(|r| json(&r)).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (form, eps=1, p=5, symbol="(2,5)", sigma="inti-gamma", t="j", model="padic", symmetrize=false))]
#[allow(clippy::too_many_arguments)]
fn lab_larmour(form: &str, eps: i8, p: u64, symbol: &str, sigma: &str, t: &str, model: &str, symmetrize: bool) -> PyResult<String> {
    lab(model, p, symbol, sigma, t)
        .and_then(|i| i.larmour_report(eps, &split_form(form), symmetrize))
        .and_then(|r| json(&r))
        .map_err(to_py)
}

#[pymodule]
fn pyhermlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(is_isotropic, m)?)?;
    m.add_function(wrap_pyfunction!(herm_is_isotropic, m)?)?;
    m.add_function(wrap_pyfunction!(u_quadratic, m)?)?;
    m.add_function(wrap_pyfunction!(u_exact, m)?)?;
    m.add_function(wrap_pyfunction!(u_search, m)?)?;
    m.add_function(wrap_pyfunction!(bounds_ai, m)?)?;
    m.add_function(wrap_pyfunction!(bounds_tensor, m)?)?;
    m.add_function(wrap_pyfunction!(verify_paper, m)?)?;
    m.add_function(wrap_pyfunction!(lab_pid, m)?)?;
    m.add_function(wrap_pyfunction!(lab_larmour, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrappers() {
        assert!(!quad_isotropic("CDV(F5)", "1,u,pi,u*pi").unwrap());
        assert_eq!(exact("CDV(CDV(F5))", "(u,t)", "minus", None, &[]).unwrap().0, 2);
        assert_eq!(search("CDV(F5)", "(u,pi)", "canonical", 1, None).unwrap(), 1);
        assert_eq!(ai(3, 2, false).unwrap()["plus"], "6");
        assert_eq!(tensor(2, "8").unwrap()["minus"], "13/2");
        assert!(matches!(involution(&FieldDesc::qp(5).unwrap(), "unitary", None), Err(Error::Invalid(_))));
    }

    #[test]
    fn lab_wrapper() {
        let r = lab("padic", 5, "(2,5)", "gamma", "j").unwrap().pid_report().unwrap();
        assert_eq!(r.case, 2);
    }
}
