use fusedet::camera::Box2D;
use fusedet::harness::*;

#[test]
fn stickman_inside_box() {
    for b in [
        Box2D::new(10.0, 20.0, 110.0, 320.0).unwrap(),
        Box2D::new(0.0, 0.0, 300.0, 40.0).unwrap(),
        Box2D::new(5.0, 5.0, 6.0, 500.0).unwrap(),
    ] {
        let m = stickman_segments(&b);
        let (cx, cy, r) = m.head;
        assert!(cx - r >= b.u_min && cx + r <= b.u_max && cy - r >= b.v_min && cy + r <= b.v_max);
        for [x1, y1, x2, y2] in m.segments {
            for (x, y) in [(x1, y1), (x2, y2)] {
                assert!(
                    x >= b.u_min && x <= b.u_max && y >= b.v_min && y <= b.v_max,
                    "{b:?}"
                );
            }
        }
    }
}
