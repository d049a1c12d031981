use std::ffi::CStr;
use std::ptr;

use kout_ffi::*;

fn new_params(n: u64, mu: &[f64], k: &[u64]) -> *mut KoutParams {
    let mut p = ptr::null_mut();
    let status = unsafe { kout_params_new(n, mu.as_ptr(), k.as_ptr(), mu.len(), &mut p) };
    assert_eq!(status, KoutStatus::Ok);
    assert!(!p.is_null());
    p
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(kout_last_error()).to_string_lossy().into_owned() }
}

#[test]
fn invalid_params_report_status_and_message() {
    let mut p = ptr::null_mut();
    let mu = [0.5, 0.6];
    let k = [1u64, 2];
    let status = unsafe { kout_params_new(10, mu.as_ptr(), k.as_ptr(), 2, &mut p) };
    assert_eq!(status, KoutStatus::InvalidParams);
    assert!(p.is_null());
    assert!(last_error().contains("sum"), "{}", last_error());

    let status = unsafe { kout_params_new(10, ptr::null(), k.as_ptr(), 2, &mut p) };
    assert_eq!(status, KoutStatus::NullPointer);

    let mut buf = [0 as std::ffi::c_char; 8];
    let full = unsafe { kout_last_error_copy(buf.as_mut_ptr(), buf.len()) };
    assert!(full > 7);
    let copied = unsafe { CStr::from_ptr(buf.as_ptr()) };
    assert_eq!(copied.to_bytes().len(), 7);
}

#[test]
fn closed_form_queries() {
    let p = new_params(1000, &[0.9, 0.06, 0.04], &[1, 2, 3]);
    let mut ub = 0.0;
    let mut c = 0.0;
    let mut pe = 0.0;
    unsafe {
        assert_eq!(kout_upper_bound(p, &mut ub), KoutStatus::Ok);
        assert_eq!(kout_c_value(p, &mut c), KoutStatus::Ok);
        assert_eq!(kout_edge_probability(p, &mut pe), KoutStatus::Ok);
        assert_eq!(kout_upper_bound(p, ptr::null_mut()), KoutStatus::NullPointer);
        assert_eq!(kout_params_n(p), 1000);
        assert!((kout_params_k_avg(p) - 1.14).abs() < 1e-12);
    }
    assert!((ub - 0.960223).abs() < 1e-6);
    assert!((ub + c - 1.0).abs() < 1e-15);
    assert!((pe - 2.28098e-3).abs() < 1e-8);

    let mut lb = KoutLowerBound::default();
    let mut ey = 0.0;
    let mut smb = 0.0;
    let mut union = 0.0;
    unsafe {
        assert_eq!(kout_one_law_lower_bound(p, &mut lb), KoutStatus::Ok);
        assert_eq!(kout_expected_isolated_pairs(p, &mut ey), KoutStatus::Ok);
        assert_eq!(kout_second_moment_bound(p, &mut smb), KoutStatus::Ok);
        assert_eq!(kout_union_bound(p, &mut union), KoutStatus::Ok);
    }
    assert!(lb.valid);
    assert!(ey > 0.0 && smb < 1.0 && (0.0..=1.0).contains(&union));

    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(kout_bounds_json(p, &mut json), KoutStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        kout_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!((v["upper_bound_asymptotic"].as_f64().unwrap() - ub).abs() < 1e-15);
        kout_params_free(p);
    }
}

#[test]
fn single_class_lower_bound_is_an_error() {
    let p = new_params(100, &[1.0], &[3]);
    let mut lb = KoutLowerBound::default();
    unsafe {
        assert_eq!(kout_one_law_lower_bound(p, &mut lb), KoutStatus::InvalidParams);
        kout_params_free(p);
    }
}

#[test]
fn k_star_table() {
    let expected = [(0.5, 3u64), (0.9, 43), (0.95, 117)];
    for (mu, k) in expected {
        let mut out = 0;
        assert_eq!(unsafe { kout_k_star(mu, &mut out) }, KoutStatus::Ok);
        assert_eq!(out, k);
    }
    let mut out = 0;
    assert_eq!(unsafe { kout_k_star(1.5, &mut out) }, KoutStatus::InvalidArgument);
}

#[test]
fn graph_handles() {
    let p = new_params(50, &[0.5, 0.5], &[1, 3]);
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(kout_graph_build(p, 9, 0, &mut g), KoutStatus::Ok);
        assert_eq!(kout_graph_num_nodes(g), 50);
        let mut degree_sum = 0;
        for v in 0..50 {
            let mut row = ptr::null();
            let mut len = 0;
            assert_eq!(kout_graph_neighbors(g, v, &mut row, &mut len), KoutStatus::Ok);
            let row = std::slice::from_raw_parts(row, len);
            assert!(row.windows(2).all(|w| w[0] < w[1]));
            degree_sum += len;
            let mut class = 99;
            assert_eq!(kout_graph_class(g, v, &mut class), KoutStatus::Ok);
            assert!(class < 2);
        }
        assert_eq!(degree_sum, 2 * kout_graph_num_edges(g));
        let mut row = ptr::null();
        let mut len = 0;
        assert_eq!(kout_graph_neighbors(g, 50, &mut row, &mut len), KoutStatus::InvalidArgument);

        let mut census = KoutCensus::default();
        assert_eq!(kout_graph_census(g, &mut census), KoutStatus::Ok);
        assert!(census.num_components >= 1 && census.largest_component <= 50);
        assert_eq!(census.connected, census.num_components == 1);

        // Same seed and trial index give the same graph.
        let mut h = ptr::null_mut();
        assert_eq!(kout_graph_build(p, 9, 0, &mut h), KoutStatus::Ok);
        assert_eq!(kout_graph_num_edges(h), kout_graph_num_edges(g));
        kout_graph_free(h);
        kout_graph_free(g);
        kout_graph_free(ptr::null_mut());
        kout_params_free(p);
        assert_eq!(kout_graph_num_nodes(ptr::null()), 0);
    }
}

#[test]
fn simulation_and_oracle() {
    let p = new_params(4, &[1.0], &[1]);
    let mut exact = KoutExact::default();
    let mut one = KoutSimulation::default();
    let mut many = KoutSimulation::default();
    unsafe {
        assert_eq!(kout_oracle(p, &mut exact), KoutStatus::Ok);
        assert_eq!(kout_simulate(p, 20_000, 5, 1, &mut one), KoutStatus::Ok);
        assert_eq!(kout_simulate(p, 20_000, 5, 4, &mut many), KoutStatus::Ok);
        assert_eq!(kout_simulate(p, 0, 5, 1, &mut one), KoutStatus::InvalidArgument);
        kout_params_free(p);
    }
    assert!(exact.rational);
    assert_eq!(exact.state_count, 81);
    assert!((exact.p_connected - 78.0 / 81.0).abs() < 1e-15);
    assert!((exact.e_y - 2.0 / 27.0).abs() < 1e-15);
    assert_eq!(one, many);
    let sigma = (exact.p_connected * (1.0 - exact.p_connected) / 20_000.0).sqrt();
    assert!((one.p_connected - exact.p_connected).abs() <= 4.0 * sigma);
    assert!(one.ci_low <= one.p_connected && one.p_connected <= one.ci_high);

    let big = new_params(40, &[1.0], &[3]);
    unsafe {
        assert_eq!(kout_oracle(big, &mut exact), KoutStatus::TooLarge);
        kout_params_free(big);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(kout_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
