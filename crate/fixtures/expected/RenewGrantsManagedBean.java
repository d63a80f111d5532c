public class RenewGrantsManagedBean {

  @Autowired private RenewGrantsService renewGrantsService;

  public void newGrantButtonWhenButtonPressed() {
    Map<String, Object> map = new HashMap<String, Object>();
    map.put("year", renewCompanyGrants.getYear());
    map.put("grantCode", renewCompanyGrants.getGrantCode());
    renewGrantsService.newGrantButtonWhenButtonPressed1(map);
    if ((Double)map.get("moneyPaid") >= (Double)map.get("threshold")) {
      setRenewCompanyGrantsGrantRenewedVisible(true); // Generated by UI Migrator component
    } else {
      setRenewCompanyGrantsThresholdNotExceededVisible(true); // Generated by UI Migrator component
    }
    renewGrantsService.newGrantButtonWhenButtonPressed2(map);
    renewCompanyGrants.setThresholdDiference((String)map.get("thresholdDiference")); // Generated by UI Migrator component
    renewCompanyGrants.setTotalAmount((String)map.get("totalAmount")); // Generated by UI Migrator component
  }

  // ... Methods generated by UI Migrator component

}
