@Service
public class RenewGrantsService {

  @Autowired private RenewGrantsAppService renewGrantsAppService;
  private EntityManagerFactory emf;

  public void newGrantButtonWhenButtonPressed1(Map<String, Object> map) {
    try {
      String companyName = renewGrantsAppService.normalizeCompanyName(map);
      map.put("moneyPaid", readFromDB("SELECT sum(PAYMENT) FROM GRANTS.GRANTS_PAYMENTS WHERE ...");
      map.put("endowment", readFromDB("SELECT endowment FROM GRANTS.COMPANY_GRANTS ..."));
      map.put("threshold", readFromDB("SELECT threshold FROM GRANTS.COMPANY_GRANTS ..."));
      Double total = ((2 * (Double)map.get("endowment")) - (Double)map.get("moneyPaid"));
      if ((Double)map.get("moneyPaid") >= (Double)map.get("threshold")) {
        writeToDB("UPDATE GRANTS.COMPANY_GRANTS_GRANTED SET state = 'SUSPENDED' WHERE ...");
        writeToDB("INSERT INTO GRANTS.COMPANY_GRANTS_GRANTED (....) VALUES ( ? , ? , ? , ? , ? )", ...);
      }
    } catch (Exception e) {
      message("Database unaccesible")/* TODO: PL/SQL Library Call */;
      throw new FormTriggerFailure();
    }
  }

  public void newGrantButtonWhenButtonPressed2(Map<String, Object> map) {
    Double diference = ((Double)map.get("threshold") - (Double)map.get("moneyPaid"));
    if (diference > 0) {
      map.put("thresholdDiference", diference);
    } else {
      map.put("totalAmount", ((2 * (Double)map.get("endowment")) - (Double)map.get("moneyPaid")));
    }
  }
}
