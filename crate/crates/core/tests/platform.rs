mod common;

use forms2mvc::kdm::inject;
use forms2mvc::platform::*;
use forms2mvc::primitives::kdm_to_primitives;
use forms2mvc::frontend::parse_form;

fn plan(src: &str) -> PlatformPlan {
    let form = parse_form(src).unwrap();
    let inj = inject(&form, src, "f.form");
    let t = kdm_to_primitives(&inj.model);
    primitives_to_platform(&t.root, &inj.model)
}

#[test]
fn fixture_platform() {
    let p = plan(common::FIXTURE);
    let m = &p.model;
    assert!(p.diagnostics.is_empty(), "{:?}", p.diagnostics);
    assert_eq!(m.managed_beans.len(), 1);
    let bean = &m.managed_beans[0];
    assert_eq!(bean.name, "RenewGrantsManagedBean");
    assert_eq!(bean.event_handlers.len(), 1);
    assert_eq!(bean.event_handlers[0].name, "newGrantButtonWhenButtonPressed");
    assert!(bean.event_handlers[0].method.is_none());
    let controller = m.controller_of(&bean.id).unwrap();
    assert_eq!(controller.name, "RenewGrantsService");
    assert!(controller.methods.is_empty());
    let app = m.app_service().unwrap();
    assert_eq!((app.id.as_str(), app.name.as_str()), ("s0", "RenewGrantsAppService"));
    assert!(matches!(&app.methods[..], [ServiceMethod::HelperServiceMethod { method: None, .. }]));
    assert_eq!(m.views[0].name, "RENEW_GRANTS");
    assert_eq!(TargetPlatformModel::from_json(&m.to_json()).unwrap(), *m);
}

#[test]
fn separation_adds_numbered_controller_methods() {
    let out = forms2mvc::pipeline::run(common::FIXTURE, "f.form", &Default::default()).unwrap();
    let controller = out.platform.controller_of("mb1").unwrap();
    let ordinals: Vec<u32> = controller
        .methods
        .iter()
        .map(|s| match s {
            ServiceMethod::EventHandlerServiceMethod { ordinal, .. } => *ordinal,
            _ => panic!("helper in controller"),
        })
        .collect();
    assert_eq!(ordinals, [1, 2]);
}

#[test]
fn one_bean_and_controller_per_window() {
    let src = "FORM SHOP\nWINDOW ORDERS\nITEM B1 : BUTTON\nTRIGGER B1.WHEN-BUTTON-PRESSED\nBEGIN COMMIT; END;\nEND TRIGGER\n\
               WINDOW CUSTOMER_LIST\nITEM B2 : BUTTON\nTRIGGER B2.WHEN-BUTTON-PRESSED\nBEGIN COMMIT; END;\nEND TRIGGER\nEND FORM\n";
    let m = plan(src).model;
    let beans: Vec<_> = m.managed_beans.iter().map(|b| b.name.as_str()).collect();
    assert_eq!(beans, ["OrdersManagedBean", "CustomerListManagedBean"]);
    let controllers: Vec<_> = m
        .services
        .iter()
        .filter(|s| s.kind == ServiceKind::Controller)
        .map(|s| s.name.as_str())
        .collect();
    assert_eq!(controllers, ["OrdersService", "CustomerListService"]);
    assert!(m.app_service().is_none());
}

#[test]
fn skipped_triggers() {
    let src = "FORM F\nWINDOW W BLOCK BLK\nITEM A : BUTTON\nTRIGGER A.WHEN-BUTTON-PRESSED\nEND TRIGGER\n\
               TRIGGER BLK.POST-QUERY\nBEGIN COMMIT; END;\nEND TRIGGER\nEND FORM\n";
    let p = plan(src);
    assert!(p.model.managed_beans.is_empty());
    let codes: Vec<_> = p.diagnostics.iter().map(|d| d.code.as_str()).collect();
    assert_eq!(codes, ["T002", "T001"]);
    assert!(p.diagnostics.iter().all(|d| !d.is_error()));
}
