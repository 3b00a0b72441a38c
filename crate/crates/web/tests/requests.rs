use zeta_web::{eigen_json, profile_json, solve_json, EigenResponse, ProfileResponse, SolveResponse};

const POW4: &str = r#"{
    "model": {
        "grid": {"kind": "interval", "a": 0.0, "b": 1.0, "n": 63},
        "psi": {"kind": "semilinear"},
        "nonlinearity": {"family": "power", "p": 4.0}
    },
    "r_min": 1.0, "r_max": 100.0, "samples": 8
}"#;

#[test]
fn profile_changes_sign_once() {
    let p: ProfileResponse = serde_json::from_str(&profile_json(POW4).unwrap()).unwrap();
    assert_eq!(p.samples.len(), 8);
    assert!(p.failed_at.is_none());
    let changes = p
        .samples
        .windows(2)
        .filter(|w| w[0].dzeta.signum() != w[1].dzeta.signum())
        .count();
    assert_eq!(changes, 1);
}

#[test]
fn solve_returns_a_positive_solution() {
    let s: SolveResponse = serde_json::from_str(&solve_json(POW4).unwrap()).unwrap();
    assert!((s.c_star - 0.5 * s.r_star).abs() <= 1e-8 * s.c_star);
    assert_eq!(s.nodes.len(), 63);
    assert!(s.solution.iter().all(|&u| u >= 0.0));
}

#[test]
fn eigenvalue_is_near_pi_squared() {
    let e: EigenResponse = serde_json::from_str(&eigen_json(POW4).unwrap()).unwrap();
    let pi2 = std::f64::consts::PI.powi(2);
    assert!((e.lambda1 - pi2).abs() <= 3e-3 * pi2);
}

#[test]
fn bad_requests_are_errors() {
    assert!(profile_json("{").is_err());
    assert!(profile_json(&POW4.replace("\"samples\": 8", "\"samples\": 1")).is_err());
    let linear = POW4.replace(r#""family": "power", "p": 4.0"#, r#""family": "linear", "lambda": 1.0"#);
    assert!(solve_json(&linear).unwrap_err().contains("geometry"));
}
