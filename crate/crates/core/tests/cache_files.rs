use std::fs;

use orthorec::cache::{self, CachedTable, Engine};
use orthorec::{ball_coefficients, exact_coefficients, Error};

#[test]
fn store_and_load() {
    let dir = tempfile::tempdir().unwrap();
    let e = CachedTable::Exact(exact_coefficients(100).unwrap());
    let b = CachedTable::Ball(ball_coefficients(500, 1e-20, 128).unwrap());
    for t in [&e, &b] {
        let path = dir
            .path()
            .join(cache::file_name(t.engine(), t.n_max(), t.precision_bits()));
        cache::store(&path, t).unwrap();
        assert_eq!(&cache::load(&path).unwrap(), t);
        // identical tables give identical files
        let again = dir.path().join("again.csv");
        cache::store(&again, t).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
    }
    assert_eq!(
        cache::file_name(Engine::Ball, 20000, 256).to_str(),
        Some("ball-n20000-p256.csv")
    );
}

#[test]
fn exact_cache_promotes_to_balls() {
    let e = exact_coefficients(50).unwrap();
    let b = CachedTable::Exact(e.clone()).into_ball(128);
    for n in 0..=50 {
        assert!(b.coeff(n).contains_rational(e.coeff(n)));
    }
}

#[test]
fn truncated_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    cache::store(&path, &CachedTable::Exact(exact_coefficients(40).unwrap())).unwrap();
    let bytes = fs::read(&path).unwrap();
    fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
    assert!(matches!(cache::load(&path), Err(Error::Cache(_))));
    assert!(matches!(
        cache::load(&dir.path().join("missing.csv")),
        Err(Error::Io(_))
    ));
}
