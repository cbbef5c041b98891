//! Cross-module consistency: every closed form in camera/geodepth/bias must
//! agree with the brute-force scene projector on scenarios inside its exact
//! regime.

use std::f64::consts::FRAC_PI_2;

use monogeom::bias::{analyze_bias, analyze_bias_traced, BiasScenario, Regime};
use monogeom::camera::{project_box, Box3D, Dimensions, Point3};
use monogeom::geodepth::{depth_from_mode, DepthInputs, DepthMode, GeometryRecord};
use monogeom::kitti::CameraIntrinsics;
use monogeom::sim::{Scene, VehicleShape};

fn intr() -> CameraIntrinsics {
    CameraIntrinsics::simple(721.5377, 721.5377, 609.5593, 172.854)
}

#[test]
fn observe_agrees_with_project_box_for_cuboids() {
    // The simulator's vertex path and the camera module's corner path are
    // independent implementations of the same projection.
    let dims = Dimensions::new(1.48, 1.77, 4.23);
    let scene = Scene {
        intrinsics: intr(),
        camera_height: 1.65,
        vehicle: VehicleShape::cuboid(dims),
    };
    for (yaw, depth, lateral) in [
        (0.0, 25.0, 0.0),
        (0.9, 40.0, -4.0),
        (-2.4, 12.0, 6.5),
        (FRAC_PI_2, 55.0, 1.0),
    ] {
        let obs = scene.observe(yaw, depth, lateral).unwrap();
        let boxed = Box3D::new(dims, Point3::new(lateral, 1.65, depth), yaw);
        let bbox = project_box(&intr(), &boxed, false).unwrap();
        assert!((obs.bbox.left - bbox.left).abs() < 1e-12);
        assert!((obs.bbox.right - bbox.right).abs() < 1e-12);
        assert!((obs.bbox.top - bbox.top).abs() < 1e-12);
        assert!((obs.bbox.bottom - bbox.bottom).abs() < 1e-12);
    }
}

#[test]
fn simulated_observation_yields_consistent_geometry_record() {
    let dims = Dimensions::new(1.52, 1.63, 3.97);
    let scene = Scene {
        intrinsics: intr(),
        camera_height: 1.52,
        vehicle: VehicleShape::cuboid(dims),
    };
    let obs = scene.observe(0.6, 33.0, 0.0).unwrap();
    let record = GeometryRecord::derive(intr().f_v, dims.height, obs.h_bbox, obs.z_center).unwrap();
    assert!((record.depth_geo - obs.z_geo).abs() < 1e-9);
    assert!((record.depth_err - obs.z_err).abs() < 1e-9);
    let inputs = DepthInputs::from_record(&record);
    for mode in [
        DepthMode::GdPlusDepthErr,
        DepthMode::GdPlusDimHeightErr,
        DepthMode::GdMinusHbboxErr,
    ] {
        let z = depth_from_mode(mode, &inputs).unwrap();
        assert!((z - obs.z_center).abs() < 1e-9, "{mode:?}");
    }
}

/// Map a bias scenario onto the simulator: trapezoid prism, nose toward the
/// camera, closest wheel at `wheel_depth`.
fn side_view(s: &BiasScenario, hood_drop: f64) -> monogeom::sim::SimObservation {
    let length = s.total_length();
    let scene = Scene {
        intrinsics: intr(),
        camera_height: s.cam_height,
        vehicle: VehicleShape::trapezoid(
            Dimensions::new(s.obj_height, 1.63, length),
            s.hood_run,
            hood_drop,
        ),
    };
    scene
        .observe(FRAC_PI_2, s.wheel_depth + length / 2.0, 0.0)
        .unwrap()
}

#[test]
fn low_regime_worked_case_end_to_end() {
    // The gamma = 5/6 extreme: the simulator must land on the same biased
    // surface depth the closed form predicts.
    let s = BiasScenario {
        cam_height: 1.5,
        obj_height: 1.8,
        wheel_depth: 50.0,
        hood_run: 1.0,
        body_run_front: 0.94,
        body_run_rear: 1.94,
    };
    let closed = analyze_bias(&s).unwrap();
    // Hood top at camera height: the slope's upper corner may not poke
    // above the sight line to the roof's leading edge.
    let obs = side_view(&s, s.obj_height - s.cam_height + 0.05);
    assert!((obs.z_geo - closed.z_geo).abs() < 1e-9);
    assert!((obs.z_err - closed.z_err).abs() < 1e-9);
    assert!((obs.nearest_vertex_depth - s.wheel_depth).abs() < 1e-9);
    assert!(obs.z_geo > s.wheel_depth, "low regime pushes Z_geo past Z_w");
}

#[test]
fn high_regime_worked_case_end_to_end() {
    let s = BiasScenario {
        cam_height: 1.5,
        obj_height: 1.25,
        wheel_depth: 50.0,
        hood_run: 0.5,
        body_run_front: 0.5,
        body_run_rear: 1.0,
    };
    let closed = analyze_bias(&s).unwrap();
    let obs = side_view(&s, 0.4);
    assert!((obs.z_geo - closed.z_geo).abs() < 1e-9);
    assert!((obs.z_err - closed.z_err).abs() < 1e-9);
    assert!(obs.z_geo < s.wheel_depth, "high regime pulls Z_geo short of Z_w");
}

#[test]
fn unity_scenario_has_no_bias_in_either_route() {
    let s = BiasScenario {
        cam_height: 1.6,
        obj_height: 1.6,
        wheel_depth: 35.0,
        hood_run: 0.8,
        body_run_front: 1.14,
        body_run_rear: 1.94,
    };
    let closed = analyze_bias(&s).unwrap();
    assert_eq!(closed.regime, Regime::Unity);
    let obs = side_view(&s, 0.79);
    assert!((obs.z_geo - s.wheel_depth).abs() < 1e-9);
    assert!((obs.z_err - (s.body_run_front + s.hood_run)).abs() < 1e-9);
}

#[test]
fn traced_wheel_height_matches_silhouette_ratio() {
    // H_w / Z_w = H / Z_geo is the similar-triangle step behind the bias
    // closed form; the trace must satisfy it on both sides of unity.
    for (obj_height, cam_height) in [(1.8, 1.5), (1.25, 1.5)] {
        let s = BiasScenario {
            cam_height,
            obj_height,
            wheel_depth: 42.0,
            hood_run: 0.9,
            body_run_front: 1.0,
            body_run_rear: 1.9,
        };
        let (result, trace) = analyze_bias_traced(&s).unwrap();
        let lhs = trace.wheel_height / s.wheel_depth;
        let rhs = s.obj_height / result.z_geo;
        assert!((lhs - rhs).abs() < 1e-12, "similar triangles violated");
    }
}

#[test]
fn bias_drift_over_depth_stays_inside_limit_band() {
    // Sweeping the wheel depth moves sigma1 monotonically between its
    // endpoints gamma and 1; the simulator must stay inside that band too.
    let s = BiasScenario {
        cam_height: 1.5,
        obj_height: 2.0,
        wheel_depth: 10.0,
        hood_run: 1.2,
        body_run_front: 0.8,
        body_run_rear: 2.0,
    };
    let gamma = s.gamma();
    for wheel_depth in [8.0, 15.0, 30.0, 60.0, 120.0] {
        let scenario = BiasScenario { wheel_depth, ..s };
        let obs = side_view(&scenario, s.obj_height - s.cam_height + 0.05);
        let sigma_effective = (obs.z_err - scenario.body_run_front) / scenario.hood_run;
        assert!(
            sigma_effective > gamma && sigma_effective < 1.0,
            "sigma from simulator {sigma_effective} outside ({gamma}, 1)"
        );
    }
}
