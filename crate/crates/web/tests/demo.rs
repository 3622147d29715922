use twomode_web::{closed_form_curves, joint_photon_distribution, lossy_curves};

#[test]
fn lossless_curves_match_between_engines() {
    let a = closed_form_curves(10.0, 40.0, 100.0, 201).unwrap();
    let m = lossy_curves(0.0, 10.0, 40.0, 100.0, 201).unwrap();
    assert_eq!(a.t().len(), 201);
    assert_eq!(a.t(), m.t());
    for (x, y) in a.duan().iter().zip(m.duan()) {
        assert!((x - y).abs() < 1e-9);
    }
    for (x, y) in a.photons().iter().zip(m.photons()) {
        assert!((x - y).abs() <= 1e-8 * x.max(1.0));
    }
}

#[test]
fn loss_raises_the_duan_sum() {
    let clean = lossy_curves(0.0, 10.0, 40.0, 50.0, 51).unwrap();
    let lossy = lossy_curves(0.02, 10.0, 40.0, 50.0, 51).unwrap();
    assert_eq!(*lossy.t().last().unwrap(), 50.0);
    for (c, l) in clean.duan().iter().zip(lossy.duan()).skip(1) {
        assert!(l >= *c && l < 2.0);
    }
}

#[test]
fn undriven_distribution_is_diagonal() {
    let d = 12;
    let p = joint_photon_distribution(0.0, 0.0, 300.0, d).unwrap();
    assert_eq!(p.len(), d * d);
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    for n1 in 0..d {
        for n2 in 0..d {
            if n1 != n2 {
                assert_eq!(p[n1 * d + n2], 0.0);
            }
        }
    }
    assert!(p[0] > 0.97 && p[d + 1] > 0.0);
}

#[test]
fn bad_inputs_are_reported() {
    assert!(closed_form_curves(10.0, 40.0, -1.0, 10).is_err());
    assert!(closed_form_curves(10.0, 40.0, 10.0, 1).is_err());
    assert!(lossy_curves(-0.1, 0.0, 0.0, 10.0, 10).is_err());
    assert!(joint_photon_distribution(0.0, 0.0, 1.0, 2).is_err());
    // Default drives displace far beyond a small truncation.
    assert!(joint_photon_distribution(10.0, 40.0, 100.0, 12)
        .unwrap_err()
        .contains("truncation"));
}
