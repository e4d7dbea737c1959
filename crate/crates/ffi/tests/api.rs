use std::ffi::{CStr, CString};
use std::ptr;

use fourcast_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(fc_last_error_message()) }.to_string_lossy().into_owned()
}

unsafe fn series(origin: &str, v: &[f64]) -> *mut FcSeries {
    let mut s = ptr::null_mut();
    assert_eq!(fc_series_new(c(origin).as_ptr(), v.as_ptr(), v.len(), &mut s), FcStatus::Ok);
    s
}

// Sine plus a fixed pseudo-random wobble; temperature with a heating season.
fn data(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut state = 7_u64;
    let mut demand = Vec::with_capacity(n);
    let mut temp = Vec::with_capacity(n);
    for t in 0..n {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let u = (state >> 11) as f64 / (1u64 << 53) as f64;
        let tt = 12.0 - 10.0 * (std::f64::consts::TAU * t as f64 / 365.25).cos() + 4.0 * (u - 0.5);
        temp.push(tt);
        demand.push(100.0 + 5.0 * (18.0 - tt).max(0.0) + 6.0 * (u - 0.5));
    }
    (demand, temp)
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(fc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn fit_save_load_forecast() {
    let (d, t) = data(3 * 365);
    unsafe {
        let ds = series("2010-01-01", &d);
        let ts = series("2010-01-01", &t);
        assert_eq!(fc_series_len(ds), d.len());
        let spec = fc_spec_default();
        let mut m = ptr::null_mut();
        let st = fc_model_fit(FcModelKind::Fsetf, ds, ts, &spec, c("2012-01-01").as_ptr(), &mut m);
        assert_eq!(st, FcStatus::Ok, "{}", last_error());
        assert_eq!(fc_model_coefficient_count(m), 42);

        let dir = tempfile::tempdir().unwrap();
        let path = c(dir.path().join("m.csv").to_str().unwrap());
        assert_eq!(fc_model_save(m, path.as_ptr()), FcStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(fc_model_load(path.as_ptr(), &mut back), FcStatus::Ok);
        let mut a = vec![0.0; 42];
        let mut b = vec![0.0; 42];
        assert_eq!(fc_model_coefficients(m, a.as_mut_ptr(), 42), FcStatus::Ok);
        assert_eq!(fc_model_coefficients(back, b.as_mut_ptr(), 42), FcStatus::Ok);
        assert_eq!(a, b);
        let mut label = [0 as std::ffi::c_char; 8];
        assert_eq!(fc_model_coefficient_label(m, 41, label.as_mut_ptr(), 8), FcStatus::Ok);
        assert_eq!(CStr::from_ptr(label.as_ptr()).to_str().unwrap(), "lag1");
        assert_eq!(fc_model_coefficient_label(m, 41, label.as_mut_ptr(), 3), FcStatus::BufferTooSmall);

        let mut f = ptr::null_mut();
        let (from, to) = (c("2012-01-01"), c("2012-03-31"));
        assert_eq!(
            fc_forecast_horizon(m, from.as_ptr(), to.as_ptr(), ts, &mut f),
            FcStatus::InvalidArgument
        );
        assert!(last_error().contains("feedback"));
        let st = fc_forecast_feedback(back, from.as_ptr(), to.as_ptr(), ts, ds, &mut f);
        assert_eq!(st, FcStatus::Ok, "{}", last_error());
        assert_eq!(fc_forecast_len(f), 91);
        let mut p = vec![0.0; 91];
        assert_eq!(fc_forecast_predictions(f, p.as_mut_ptr(), 90), FcStatus::BufferTooSmall);
        assert_eq!(fc_forecast_predictions(f, p.as_mut_ptr(), 91), FcStatus::Ok);
        let mut metrics = FcMetrics::default();
        assert_eq!(fc_forecast_metrics(f, &mut metrics), FcStatus::Ok);
        assert_eq!(metrics.n, 91);
        assert!(metrics.mape_percent > 0.0 && metrics.mape_percent < 5.0);

        fc_forecast_free(f);
        fc_model_free(m);
        fc_model_free(back);
        fc_series_free(ds);
        fc_series_free(ts);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(fc_series_new(ptr::null(), ptr::null(), 0, &mut s), FcStatus::NullPointer);
        assert_eq!(fc_series_new(c("2010-13-01").as_ptr(), [1.0].as_ptr(), 1, &mut s), FcStatus::Parse);
        assert_eq!(
            fc_series_from_csv(c("/nonexistent/demand.csv").as_ptr(), 3, &mut s),
            FcStatus::Io
        );
        assert!(last_error().contains("/nonexistent/demand.csv"));

        let short = series("2010-01-01", &[1.0; 100]);
        let spec = fc_spec_default();
        let mut m = ptr::null_mut();
        let st = fc_model_fit(FcModelKind::Fse, short, ptr::null(), &spec, c("2011-01-01").as_ptr(), &mut m);
        assert_eq!(st, FcStatus::InsufficientHistory);
        assert!(m.is_null());
        fc_series_free(short);

        let bad = FcRegressorSpec {
            weekly_harmonics: 4,
            ..spec
        };
        assert_eq!(fc_spec_validate(&bad), FcStatus::SpecViolation);
        assert!(last_error().contains("2-day"));
        assert_eq!(fc_spec_validate(&spec), FcStatus::Ok);
        assert_eq!(last_error(), "");
    }
}

#[test]
fn scalar_functions() {
    let a = [100.0, 200.0];
    let f = [110.0, 190.0];
    let mut out = 0.0;
    unsafe {
        assert_eq!(fc_mape(a.as_ptr(), f.as_ptr(), 2, &mut out), FcStatus::Ok);
        assert!((out - 7.5).abs() < 1e-12);
        assert_eq!(fc_rmse(a.as_ptr(), f.as_ptr(), 2, &mut out), FcStatus::Ok);
        assert!((out - 10.0).abs() < 1e-12);
        assert_eq!(fc_rmse_percent(a.as_ptr(), f.as_ptr(), 2, &mut out), FcStatus::Ok);
        assert!((out - 10.0 / 150.0 * 100.0).abs() < 1e-12);
        assert_eq!(fc_mape(a.as_ptr(), f.as_ptr(), 0, &mut out), FcStatus::InvalidArgument);
        assert_eq!(fc_ratio_holiday(181.19, 100.0, &mut out), FcStatus::Ok);
        assert!((out - 81.19).abs() < 1e-9);
        assert_eq!(fc_ratio_weekend(121.15, 100.0, &mut out), FcStatus::Ok);
        assert!((out - 21.15).abs() < 1e-9);
        assert_eq!(fc_ratio_weekend(1.0, 0.0, &mut out), FcStatus::InvalidArgument);
    }
    assert_eq!(fc_temperature_deviation(10.0, 18.0), 8.0);
    assert_eq!(fc_temperature_deviation(20.0, 18.0), 0.0);
}
