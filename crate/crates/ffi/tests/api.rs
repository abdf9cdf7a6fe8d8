use std::ffi::{CStr, CString, c_char};
use std::ptr;

use awi_ffi::*;

struct Cat(*mut AwiCatalog);

impl Cat {
    fn builtin() -> Self {
        let mut p = ptr::null_mut();
        assert_eq!(unsafe { awi_catalog_builtin(&mut p) }, AwiStatus::Ok);
        assert!(!p.is_null());
        Cat(p)
    }
}

impl Drop for Cat {
    fn drop(&mut self) {
        unsafe { awi_catalog_free(self.0) };
    }
}

struct Names(CString, CString);

fn conditions(names: &Names, pressure: f64) -> AwiConditions {
    AwiConditions {
        species: names.0.as_ptr(),
        buffer: names.1.as_ptr(),
        pressure_torr: pressure,
        temperature_k: 550.0,
        chi_raman: 0.0,
    }
}

fn names(species: &str) -> Names {
    Names(CString::new(species).unwrap(), CString::new("He").unwrap())
}

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let n = unsafe { awi_last_error(buf.as_mut_ptr(), buf.len()) };
    let s = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_string();
    assert_eq!(s.len(), n.min(255));
    s
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(awi_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn rates_match_the_core_crate() {
    let cat = Cat::builtin();
    let n = names("Na");
    let mut out = AwiRates::default();
    assert_eq!(
        unsafe { awi_rates(cat.0, &conditions(&n, 760.0), &mut out) },
        AwiStatus::Ok
    );
    let core = awi_core::SpeciesCatalog::builtin();
    let want = awi_core::rates::build_rate_set(core.atom("Na").unwrap(), &core.bath("He", 760.0, 550.0).unwrap());
    assert_eq!(out.w23, want.w23);
    assert_eq!(out.gamma21, want.gamma21);
    assert_eq!(out.gamma32, want.gamma32);
}

#[test]
fn populations_sum_to_one() {
    let cat = Cat::builtin();
    let n = names("K");
    let mut p = AwiPopulations::default();
    assert_eq!(
        unsafe { awi_populations(cat.0, &conditions(&n, 3.1), 92.0, 0.0, &mut p) },
        AwiStatus::Ok
    );
    assert!((p.r1 + p.r2 + p.r3 - 1.0).abs() < 1e-12);
    assert!((p.r1 - 0.28).abs() < 0.05 && (p.r2 - 0.5).abs() < 0.05 && (p.r3 - 0.22).abs() < 0.05);
}

#[test]
fn undriven_spectrum_is_unit_lorentzian() {
    let cat = Cat::builtin();
    let n = names("K");
    let grid = [-1.0, 0.0, 1.0];
    let (mut im, mut re) = ([0.0; 3], [0.0; 3]);
    let s = unsafe {
        awi_spectrum(
            cat.0,
            &conditions(&n, 16.0),
            0.0,
            0.0,
            grid.as_ptr(),
            3,
            im.as_mut_ptr(),
            re.as_mut_ptr(),
        )
    };
    assert_eq!(s, AwiStatus::Ok);
    assert!((im[1] - 1.0).abs() < 1e-12);
    assert!((im[0] - 0.5).abs() < 1e-12 && (im[2] - 0.5).abs() < 1e-12);
    assert!((re[0] + re[2]).abs() < 1e-12);
}

#[test]
fn doppler_spectrum_shows_gain_at_line_centre() {
    let cat = Cat::builtin();
    let n = names("K");
    let grid = [0.0];
    let (mut im, mut re) = ([0.0; 1], [0.0; 1]);
    let s = unsafe {
        awi_doppler_spectrum(
            cat.0,
            &conditions(&n, 16.0),
            3400.0,
            0.0,
            0,
            grid.as_ptr(),
            1,
            im.as_mut_ptr(),
            re.as_mut_ptr(),
        )
    };
    assert_eq!(s, AwiStatus::Ok, "{}", last_error());
    assert!(im[0] < 0.0);
    let s = unsafe {
        awi_doppler_spectrum(
            cat.0,
            &conditions(&n, 16.0),
            3400.0,
            0.0,
            8,
            grid.as_ptr(),
            1,
            im.as_mut_ptr(),
            re.as_mut_ptr(),
        )
    };
    assert_eq!(s, AwiStatus::Numerical);
    assert!(last_error().contains("node spacing"));
}

#[test]
fn thresholds_and_minimum() {
    let cat = Cat::builtin();
    let n = names("Na");
    let mut k = f64::NAN;
    let low = conditions(&n, 5.0);
    assert_eq!(
        unsafe { awi_threshold(cat.0, &low, AwiThresholdKind::Inversion, &mut k) },
        AwiStatus::NotFound
    );
    assert!(k.is_nan(), "output must be untouched on failure");
    let mid = conditions(&n, 20.0);
    assert_eq!(
        unsafe { awi_threshold(cat.0, &mid, AwiThresholdKind::Gain, &mut k) },
        AwiStatus::Ok
    );
    assert!(k > 0.0);

    let (mut k0, mut p) = (0.0, 0.0);
    let s = unsafe { awi_threshold_minimum(cat.0, &low, AwiThresholdKind::Gain, 0.1, 3000.0, &mut k0, &mut p) };
    assert_eq!(s, AwiStatus::Ok);
    assert!(k0 / 848.0 < 2.0 && 848.0 / k0 < 2.0);
    assert!(p / 12.4 < 2.0 && 12.4 / p < 2.0);
}

#[test]
fn optimum_stays_below_inversion() {
    let cat = Cat::builtin();
    let n = names("K");
    let mut op = AwiOperatingPoint::default();
    assert_eq!(
        unsafe { awi_optimize_gain(cat.0, &conditions(&n, 1.0), &mut op) },
        AwiStatus::Ok
    );
    assert!(op.peak_gain > 0.0);
    let p = op.populations;
    assert!(p.r1 / 2.0 > p.r3 / 2.0);
}

#[test]
fn errors_are_reported() {
    let cat = Cat::builtin();
    let mut out = AwiRates::default();
    assert_eq!(
        unsafe { awi_rates(ptr::null(), ptr::null(), &mut out) },
        AwiStatus::NullPointer
    );

    let n = names("Cs");
    assert_eq!(
        unsafe { awi_rates(cat.0, &conditions(&n, 10.0), &mut out) },
        AwiStatus::UnknownSpecies
    );
    assert!(last_error().contains("Cs"));

    let n = names("K");
    assert_eq!(
        unsafe { awi_rates(cat.0, &conditions(&n, -1.0), &mut out) },
        AwiStatus::InvalidArgument
    );
    assert!(last_error().contains("pressure"));
    assert_eq!(
        unsafe { awi_rates(cat.0, &conditions(&n, 1.0), ptr::null_mut()) },
        AwiStatus::NullPointer
    );

    // Success clears the message.
    assert_eq!(
        unsafe { awi_rates(cat.0, &conditions(&n, 1.0), &mut out) },
        AwiStatus::Ok
    );
    assert_eq!(last_error(), "");
}

#[test]
fn last_error_truncates() {
    let path = CString::new("/nonexistent/catalog.toml").unwrap();
    let mut cat = ptr::null_mut();
    assert_eq!(unsafe { awi_catalog_load(path.as_ptr(), &mut cat) }, AwiStatus::Io);
    assert!(cat.is_null());
    let mut small = [1 as c_char; 8];
    let full = unsafe { awi_last_error(small.as_mut_ptr(), small.len()) };
    assert!(full > 7);
    assert_eq!(small[7], 0);
    assert_eq!(unsafe { awi_last_error(ptr::null_mut(), 0) }, full);
}

#[test]
fn catalog_round_trip_through_file() {
    let dir = std::env::temp_dir().join(format!("awi-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("species.toml");
    std::fs::write(&file, awi_core::species::DEFAULT_CATALOG).unwrap();
    let path = CString::new(file.to_str().unwrap()).unwrap();
    let mut cat = ptr::null_mut();
    assert_eq!(unsafe { awi_catalog_load(path.as_ptr(), &mut cat) }, AwiStatus::Ok);
    unsafe { awi_catalog_free(cat) };
    unsafe { awi_catalog_free(ptr::null_mut()) };

    std::fs::write(&file, "[species.Na\n").unwrap();
    assert_eq!(unsafe { awi_catalog_load(path.as_ptr(), &mut cat) }, AwiStatus::Parse);
    std::fs::remove_dir_all(&dir).unwrap();
}
