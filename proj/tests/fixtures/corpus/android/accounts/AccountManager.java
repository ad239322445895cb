package android.accounts;

/**
 * This class provides access to a centralized registry of the user's online
 * accounts.
 */
public class AccountManager {
    private final Account[] mAccounts = new Account[0];

    /**
     * Lists all accounts of any type registered on the device.
     *
     * @return an array of accounts, possibly empty
     */
    public Account[] getAccounts() {
        return mAccounts;
    }

    /**
     * Gets the user data named by "key" associated with the account.
     */
    public String getUserData(final Account account, final String key) {
        if (account == null) throw new IllegalArgumentException("account is null");
        return key;
    }

    /** Gets the saved password associated with the account. */
    public synchronized String getPassword(Account account) {
        return null;
    }

    /** Internal bookkeeping. */
    private static void log(String msg) {
    }

    /**
     * Number of registered accounts, from the native layer.
     */
    native int nativeCount();
}
