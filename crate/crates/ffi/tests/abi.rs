use std::ffi::{CStr, CString};
use std::fs;
use std::ptr;

use qosroute_ffi::*;

const LINE: &str = "nodes 3\n0 1 cap=1e6 prop=0.001 q=64 w=1\n1 2 cap=1e6 prop=0.001 q=64 w=1\n0 2 cap=1e6 prop=0.001 q=64 w=3\n";

fn last_error() -> String {
    let p = qr_last_error_message();
    assert!(!p.is_null(), "no error message recorded");
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn graph(text: &str) -> *mut QrGraph {
    let text = CString::new(text).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { qr_graph_from_text(text.as_ptr(), &mut g) }, QrStatus::Ok);
    g
}

#[test]
fn graph_counts_and_validation() {
    let g = graph(LINE);
    unsafe {
        assert_eq!(qr_graph_node_count(g), 3);
        assert_eq!(qr_graph_link_count(g), 6);
        let mut violations = usize::MAX;
        assert_eq!(qr_graph_violation_count(g, &mut violations), QrStatus::Ok);
        assert_eq!(violations, 0);
        assert!(qr_last_error_message().is_null());
        qr_graph_free(g);
        assert_eq!(qr_graph_node_count(ptr::null()), 0);
        qr_graph_free(ptr::null_mut());
    }
}

#[test]
fn parse_errors_carry_a_message_and_leave_out_untouched() {
    let bad = CString::new("nodes 2\n0 1 cap=1 prop=0 q=1\n").unwrap();
    let sentinel = 0x10 as *mut QrGraph;
    let mut g = sentinel;
    assert_eq!(unsafe { qr_graph_from_text(bad.as_ptr(), &mut g) }, QrStatus::Parse);
    assert_eq!(g, sentinel);
    assert!(!last_error().is_empty());
}

#[test]
fn null_and_non_utf8_inputs_are_rejected() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { qr_graph_from_text(ptr::null(), &mut g) }, QrStatus::NullPointer);
    assert!(last_error().contains("null"));
    let bytes = [0xffu8, 0xfe, 0];
    assert_eq!(unsafe { qr_graph_from_text(bytes.as_ptr().cast(), &mut g) }, QrStatus::InvalidUtf8);
    let missing = CString::new("/nonexistent/topology").unwrap();
    assert_eq!(unsafe { qr_graph_from_file(missing.as_ptr(), &mut g) }, QrStatus::Io);
    assert!(g.is_null());
}

#[test]
fn k_shortest_paths_round_trip() {
    let g = graph(LINE);
    let mut paths = ptr::null_mut();
    unsafe {
        assert_eq!(qr_k_shortest_paths(g, 0, 2, 4, ptr::null(), 0, &mut paths), QrStatus::Ok);
        assert_eq!(qr_paths_count(paths), 2);

        let mut cost = 0.0;
        assert_eq!(qr_path_cost(paths, 0, &mut cost), QrStatus::Ok);
        assert_eq!(cost, 2.0);
        assert_eq!(qr_path_cost(paths, 1, &mut cost), QrStatus::Ok);
        assert_eq!(cost, 3.0);
        assert_eq!(qr_path_cost(paths, 2, &mut cost), QrStatus::OutOfRange);

        let mut len = 0;
        let mut small = [0usize; 2];
        assert_eq!(qr_path_nodes(paths, 0, small.as_mut_ptr(), 2, &mut len), QrStatus::BufferTooSmall);
        assert_eq!(len, 3);
        let mut buf = [usize::MAX; 3];
        assert_eq!(qr_path_nodes(paths, 0, buf.as_mut_ptr(), 3, &mut len), QrStatus::Ok);
        assert_eq!(buf, [0, 1, 2]);
        qr_paths_free(paths);

        let weights = [2.0];
        assert_eq!(qr_k_shortest_paths(g, 0, 2, 1, weights.as_ptr(), 1, &mut paths), QrStatus::Ok);
        assert_eq!(qr_path_cost(paths, 0, &mut cost), QrStatus::Ok);
        assert_eq!(cost, 4.0);
        qr_paths_free(paths);

        assert_eq!(qr_k_shortest_paths(g, 0, 7, 1, ptr::null(), 0, &mut paths), QrStatus::InvalidArgument);
        qr_graph_free(g);
    }
}

#[test]
fn distributions_sum_to_one() {
    let estimates = [0.03, 0.01, 0.02];
    let mut out = [0.0; 3];
    unsafe {
        assert_eq!(qr_kspqr_distribution(estimates.as_ptr(), 3, 0.9, out.as_mut_ptr()), QrStatus::Ok);
        assert_eq!(out[1], 0.9);
        assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        let waiting = [0.0, 0.5, 0.0];
        assert_eq!(
            qr_koqra_distribution(estimates.as_ptr(), waiting.as_ptr(), 3, 2.0, 1.0, out.as_mut_ptr()),
            QrStatus::Ok
        );
        assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(out[0] > out[1], "queue at path 1 should push traffic away: {out:?}");

        assert_eq!(qr_kspqr_distribution(estimates.as_ptr(), 3, 1.5, out.as_mut_ptr()), QrStatus::InvalidArgument);
        assert_eq!(qr_kspqr_distribution(estimates.as_ptr(), 0, 0.9, out.as_mut_ptr()), QrStatus::InvalidArgument);
    }
}

#[test]
fn scenario_runs_through_the_abi() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("line.topo"), LINE).unwrap();
    let cfg = "[scenario]\nid = line\ntopology = line.topo\nduration = 20\nwindow = 5\nseeds = 1\n\n\
               [routing]\npolicy = koqra\nk = 2\n\n[traffic]\nlambda = 50\n";
    let cfg_path = dir.path().join("line.cfg");
    fs::write(&cfg_path, cfg).unwrap();
    let cfg_path = CString::new(cfg_path.to_str().unwrap()).unwrap();

    unsafe {
        let mut scenario = ptr::null_mut();
        assert_eq!(qr_scenario_load(cfg_path.as_ptr(), &mut scenario), QrStatus::Ok);
        let mut csvs = Vec::new();
        for _ in 0..2 {
            let mut run = ptr::null_mut();
            assert_eq!(qr_scenario_run(scenario, QrPolicy::Koqra, 3, &mut run), QrStatus::Ok);
            assert_eq!(qr_run_window_count(run), 4);
            let mut w = QrWindow {
                start_s: -1.0,
                end_s: -1.0,
                mean_delay_s: -1.0,
                delivered: 0,
                dropped: 0,
                control_bits: 0,
            };
            assert_eq!(qr_run_window(run, 1, &mut w), QrStatus::Ok);
            assert_eq!((w.start_s, w.end_s), (5.0, 10.0));
            assert!(w.delivered > 0 && w.mean_delay_s >= 0.002);
            assert!(w.control_bits > 0);
            assert_eq!(qr_run_window(run, 4, &mut w), QrStatus::OutOfRange);

            let mut mean = 0.0;
            assert_eq!(qr_run_mean_delay(run, &mut mean), QrStatus::Ok);
            assert!(mean.is_finite() && mean > 0.0);

            let mut csv = ptr::null_mut();
            assert_eq!(qr_run_csv(run, &mut csv), QrStatus::Ok);
            csvs.push(CStr::from_ptr(csv).to_str().unwrap().to_string());
            qr_string_free(csv);
            qr_run_free(run);
        }
        assert_eq!(csvs[0], csvs[1]);
        assert_eq!(csvs[0].lines().count(), 5);
        qr_scenario_free(scenario);
    }
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(qr_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
