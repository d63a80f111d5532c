@Service
public class RenewGrantsAppService {
  public String normalizeCompanyName(Map<String, Object> map) {
    if (length((String)map.get("companyName"))/* TODO: PL/SQL Library Call */ > 256) {
      return substr((String)map.get("companyName"), 1, 256)/* TODO: PL/SQL Library Call */;
    }
    return (String)map.get("companyName");
  }
}
